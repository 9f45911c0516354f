#include "cpac/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace cpac;
using cpac::cli::dispatch;

namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("cpac_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }

  fs::path dir_;
};

nlohmann::json parse_report(const cli::DispatchResult& r) {
  return nlohmann::json::parse(r.out);
}

TEST_F(CliTest, MachineRunIdentity) {
  const auto r = dispatch({"machine", "run", "--index", "0", "--input", "5", "--steps", "100"});
  ASSERT_EQ(r.exit_code, 0) << r.out << r.err;
  const auto j = parse_report(r);
  EXPECT_EQ(j["result"]["outcome"], "halted");
  EXPECT_EQ(j["result"]["output"], 5);
  EXPECT_EQ(j["schema"], "cpac-report/1");
}

TEST_F(CliTest, MachineEnumFromProgramFile) {
  const std::string prog = write("evens.cm",
                                 "DJZ 0 4\n"
                                 "DJZ 0 3\n"
                                 "DJZ 1 0\n"
                                 "DJZ 1 3\n");
  // the general-page index of the 4-instruction parity loop is large, so
  // the conventioned stage below it stays empty; the macro-page index 14
  // enumerates the evens
  const auto macro = dispatch({"machine", "enum", "--index", "14", "--steps", "32"});
  ASSERT_EQ(macro.exit_code, 0);
  const auto j = parse_report(macro);
  EXPECT_GE(j["result"]["count"].get<Nat>(), 5u);
  const auto file = dispatch({"machine", "enum", "--program", prog, "--steps", "32"});
  ASSERT_EQ(file.exit_code, 0);
  EXPECT_EQ(parse_report(file)["result"]["count"], 0);
}

TEST_F(CliTest, UnknownFlagIsUsageError) {
  const auto r = dispatch({"machine", "run", "--index", "0", "--input", "1", "--steps", "5",
                           "--frobnicate", "1"});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("--frobnicate"), std::string::npos);
  const auto incomplete = dispatch({"machine", "run", "--frobnicate", "1"});
  EXPECT_EQ(incomplete.exit_code, 2);
}

TEST_F(CliTest, MissingSubcommandIsUsageError) {
  EXPECT_EQ(dispatch({}).exit_code, 2);
}

TEST_F(CliTest, VcCheckThresholdPair) {
  const std::string spec = write("thd.spec", "base = thd\nmembership = all\n");
  const auto r = dispatch({"vc", "check", "--class", spec, "--points", "2,5"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(parse_report(r)["result"]["shattered"], false);
}

TEST_F(CliTest, VcLowerBoundWitness) {
  const std::string spec = write("ivl.spec", "base = ivl\nmembership = all\n");
  const auto r = dispatch({"vc", "lower-bound", "--class", spec, "--d", "2", "--domain", "10"});
  ASSERT_EQ(r.exit_code, 0);
  const auto j = parse_report(r);
  EXPECT_EQ(j["result"]["witness"], (std::vector<int>{1, 2}));
  EXPECT_EQ(j["result"]["verified"], true);
}

TEST_F(CliTest, ErmReportsExactRational) {
  const std::string spec = write("thd.spec", "base = thd\nmembership = all\n");
  const std::string sample = write("s.tsv", "1\t1\n3\t0\n");
  const auto r = dispatch({"erm", "--class", spec, "--sample", sample});
  ASSERT_EQ(r.exit_code, 0);
  const auto j = parse_report(r);
  EXPECT_EQ(j["result"]["hypothesis"]["t"], 2);
  EXPECT_EQ(j["result"]["empirical_error"], "0/1");
}

TEST_F(CliTest, PacVerifySixteenRows) {
  const std::string spec = write("thd.spec", "base = thd\nmembership = all\n");
  const std::string dist = write("d.tsv", "0\t1\t1/2\n1\t0\t1/2\n");
  const auto r = dispatch({"pac", "verify", "--exact", "--class", spec, "--dist", dist, "--m",
                           "4", "--a", "2", "--b", "2"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const auto j = parse_report(r);
  EXPECT_EQ(j["result"]["p"], "0/1");
  EXPECT_EQ(j["result"]["satisfied"], true);
  EXPECT_EQ(j["result"]["min_risk"], "0/1");
}

TEST_F(CliTest, ReportsAreByteIdenticalWithoutTimings) {
  const std::string spec = write("thd.spec", "base = thd\nmembership = all\n");
  const std::string dist = write("d.tsv", "0\t1\t3/4\n1\t0\t1/4\n");
  const std::vector<std::string> args{"--no-timings", "pac",  "verify", "--mc", "--class", spec,
                                      "--dist",       dist,  "--m",    "2",    "--a",     "2",
                                      "--b",          "2",   "--seed", "7",    "--trials", "2000"};
  const auto first = dispatch(args);
  const auto second = dispatch(args);
  ASSERT_EQ(first.exit_code, 0);
  EXPECT_EQ(first.out, second.out);
  EXPECT_EQ(first.out.find("timings"), std::string::npos);
}

TEST_F(CliTest, LowestTermsSerialization) {
  const std::string spec = write("thd.spec", "base = thd\nmembership = all\n");
  const std::string dist = write("d.tsv", "0\t1\t2/4\n1\t0\t1/2\n");  // 2/4 normalizes
  const auto r = dispatch({"pac", "verify", "--exact", "--class", spec, "--dist", dist, "--m",
                           "2", "--a", "2", "--b", "2"});
  ASSERT_EQ(r.exit_code, 0);
  const std::string out = r.out;
  EXPECT_EQ(out.find("2/4"), std::string::npos);
}

TEST_F(CliTest, DomainErrorsExitOne) {
  const auto missing = dispatch({"erm", "--class", "/nonexistent.spec", "--sample", "/none.tsv"});
  EXPECT_EQ(missing.exit_code, 1);
  EXPECT_EQ(parse_report(missing)["error"]["kind"], "parse-error");

  const std::string fin = write("fin.spec", "base = fin\nmembership = all\n");
  const auto infinite = dispatch({"learn", "synth", "--class", fin});
  EXPECT_EQ(infinite.exit_code, 1);
  EXPECT_EQ(parse_report(infinite)["error"]["kind"], "infinite-vc");
}

TEST_F(CliTest, BadDistributionRejected) {
  const std::string spec = write("thd.spec", "base = thd\nmembership = all\n");
  const std::string dist = write("bad.tsv", "0\t1\t1/2\n1\t0\t1/3\n");
  const auto r = dispatch({"pac", "verify", "--exact", "--class", spec, "--dist", dist, "--m",
                           "1", "--a", "2", "--b", "2"});
  EXPECT_EQ(r.exit_code, 1);
}

TEST_F(CliTest, ClassShowPreviewsMembers) {
  const std::string spec = write("mix.spec", "# two thresholds\nbase = thd\nmembership = explicit: 4, 1\n");
  const auto r = dispatch({"class", "show", "--class", spec});
  ASSERT_EQ(r.exit_code, 0);
  const auto j = parse_report(r);
  EXPECT_EQ(j["result"]["membership"]["kind"], "explicit");
  EXPECT_EQ(j["result"]["membership"]["indices"], (std::vector<int>{1, 4}));
  EXPECT_EQ(j["result"]["preview"][0]["t"], 1);
}

TEST_F(CliTest, ClassRestrictThresholds) {
  const std::string spec = write("thd.spec", "base = thd\nmembership = all\n");
  const auto r = dispatch({"class", "restrict", "--class", spec, "--points", "2,5"});
  ASSERT_EQ(r.exit_code, 0);
  const auto j = parse_report(r);
  EXPECT_EQ(j["result"]["count"], 3);
  EXPECT_EQ(j["result"]["exact"], true);
}

TEST_F(CliTest, FamilyCommandsEmitReusableClassText) {
  const auto r = dispatch({"family", "fin", "--index", "109", "--stage", "150"});
  ASSERT_EQ(r.exit_code, 0);
  const auto j = parse_report(r);
  EXPECT_EQ(j["result"]["indices"], (std::vector<int>{0, 1, 2}));
  const std::string respec = write("fin2.spec", j["result"]["class_text"].get<std::string>());
  const auto reuse = dispatch({"class", "show", "--class", respec});
  EXPECT_EQ(reuse.exit_code, 0);
}

TEST_F(CliTest, NflOnConstantLearner) {
  const auto r = dispatch({"nfl", "--learner", "const0", "--m", "1", "--points", "0,1"});
  ASSERT_EQ(r.exit_code, 0);
  const auto j = parse_report(r);
  EXPECT_EQ(j["result"]["p"], "1/1");
  EXPECT_EQ(j["result"]["p_at_least_1_7"], true);
}

TEST_F(CliTest, ExtractErmWithInjectedM) {
  const std::string spec = write("thd.spec", "base = thd\nmembership = all\n");
  const std::string sample = write("s.tsv", "1\t1\n3\t0\n");
  const auto r = dispatch({"extract-erm", "--class", spec, "--sample", sample, "--mode",
                           "exact", "--inject-m", "3"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const auto j = parse_report(r);
  EXPECT_EQ(j["result"]["empirical_error"], "0/1");
  EXPECT_EQ(j["result"]["m"], 3);
}

TEST_F(CliTest, ArithEmitClassifyEvalPipeline) {
  const auto emit = dispatch({"arith", "emit", "--kind", "vc", "--class",
                              "explicit:thd:0,1,2,3,4,5,6", "--d", "2"});
  ASSERT_EQ(emit.exit_code, 0);
  const auto j = parse_report(emit);
  EXPECT_EQ(j["result"]["classification"], "Pi_1");
  const std::string formula = write("f.sexpr", j["result"]["formula"].get<std::string>());

  const auto cls = dispatch({"arith", "classify", "--formula", formula});
  ASSERT_EQ(cls.exit_code, 0);
  EXPECT_EQ(parse_report(cls)["result"]["classification"], "Pi_1");

  const auto eval = dispatch({"arith", "eval", "--formula", formula, "--bound", "8"});
  ASSERT_EQ(eval.exit_code, 0);
  EXPECT_EQ(parse_report(eval)["result"]["value"], true);
}

TEST_F(CliTest, ArithEmitFromClassFile) {
  const std::string spec = write("thd.spec", "base = thd\nmembership = all\n");
  const auto r = dispatch({"arith", "emit", "--kind", "scpac", "--class", spec});
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(parse_report(r)["result"]["classification"], "Sigma_3");
}

TEST_F(CliTest, BudgetFlagCapsEnumeration) {
  const std::string spec = write("thd.spec", "base = thd\nmembership = all\n");
  const std::string dist =
      write("d.tsv", "0\t1\t1/4\n1\t0\t1/4\n2\t1\t1/4\n3\t0\t1/4\n");
  const auto r = dispatch({"--budget", "100", "pac", "verify", "--exact", "--class", spec,
                           "--dist", dist, "--m", "8", "--a", "2", "--b", "2"});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(parse_report(r)["error"]["kind"], "enumeration-budget-exceeded");
}

TEST_F(CliTest, EnvBudgetIsDefault) {
  ::setenv("CPAC_BUDGET", "100", 1);
  const std::string spec = write("thd.spec", "base = thd\nmembership = all\n");
  const std::string dist =
      write("d.tsv", "0\t1\t1/4\n1\t0\t1/4\n2\t1\t1/4\n3\t0\t1/4\n");
  const auto r = dispatch({"pac", "verify", "--exact", "--class", spec, "--dist", dist, "--m",
                           "8", "--a", "2", "--b", "2"});
  ::unsetenv("CPAC_BUDGET");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(parse_report(r)["error"]["kind"], "enumeration-budget-exceeded");
}

TEST_F(CliTest, DecidableMembershipFromFile) {
  const std::string decider = write("even.cm",
                                    "DJZ 0 4\n"
                                    "DJZ 0 6\n"
                                    "DJZ 1 0\n"
                                    "HALT\n"
                                    "INC 0\n"
                                    "HALT\n");
  const std::string spec = write("dr.spec",
                                 "base = thd\n"
                                 "membership = decidable: even.cm\n"
                                 "budget = 4096\n");
  const auto r = dispatch({"--cutoff", "64", "class", "restrict", "--class", spec, "--points",
                           "1,3"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(parse_report(r)["result"]["exact"], false);
}

}  // namespace
