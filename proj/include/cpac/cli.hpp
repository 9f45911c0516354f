#pragma once

#include <chrono>
#include <cstdlib>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpac/arith.hpp"
#include "cpac/formats.hpp"

namespace cpac::cli {

using Json = nlohmann::ordered_json;

struct DispatchResult {
  int exit_code = 0;
  std::string out;  // structured report (stdout)
  std::string err;  // usage diagnostics (stderr)
};

inline constexpr const char* kSchemaVersion = "cpac-report/1";

namespace cli_detail {

inline Nat env_budget() {
  if (const char* v = std::getenv("CPAC_BUDGET")) {
    try {
      return std::stoull(v);
    } catch (...) {
      throw Error("CPAC_BUDGET is not a number");
    }
  }
  return kDefaultBudget;
}

inline std::string error_kind(const Error& e) {
  if (dynamic_cast<const BudgetExhausted*>(&e)) return "budget-exhausted";
  if (dynamic_cast<const EnumerationBudgetExceeded*>(&e)) return "enumeration-budget-exceeded";
  if (dynamic_cast<const UnknownAtCutoff*>(&e)) return "unknown-at-cutoff";
  if (dynamic_cast<const NoHypothesisFound*>(&e)) return "no-hypothesis-found";
  if (dynamic_cast<const MissingSampleComplexity*>(&e)) return "missing-sample-complexity";
  if (dynamic_cast<const InfiniteVc*>(&e)) return "infinite-vc";
  if (dynamic_cast<const DomainBoundTooSmall*>(&e)) return "domain-bound-too-small";
  if (dynamic_cast<const OracleFailure*>(&e)) return "oracle-failure";
  if (dynamic_cast<const ParseError*>(&e)) return "parse-error";
  return "error";
}

inline Json hypothesis_json(const Hypothesis& h) {
  Json j;
  struct Visitor {
    Json& j;
    void operator()(const FiniteSupport& f) const {
      j["kind"] = "finite-support";
      j["cut"] = f.cut;
      std::string bits;
      for (auto b : f.prefix) bits += b ? '1' : '0';
      j["prefix"] = bits;
      j["tail"] = static_cast<int>(f.tail);
    }
    void operator()(const Interval& iv) const {
      j["kind"] = "interval";
      j["lo"] = iv.lo;
      j["hi"] = iv.hi;
    }
    void operator()(const Threshold& t) const {
      if (t.omega()) {
        j["kind"] = "threshold-omega";
      } else {
        j["kind"] = "threshold";
        j["t"] = *t.t;
      }
    }
    void operator()(const InitStage& s) const {
      j["kind"] = "init-stage";
      j["stage"] = s.stage;
    }
    void operator()(const MachineBacked& m) const {
      j["kind"] = "machine-backed";
      j["index"] = m.index.value.str();
      j["budget"] = m.budget.steps;
    }
  };
  std::visit(Visitor{j}, h);
  return j;
}

inline Json membership_json(const ClassSpec& spec) {
  Json j;
  struct Visitor {
    Json& j;
    void operator()(const MembershipAll&) const { j["kind"] = "all"; }
    void operator()(const MembershipExplicit& m) const {
      j["kind"] = "explicit";
      j["indices"] = m.indices;
    }
    void operator()(const MembershipDecidable& m) const {
      j["kind"] = "decidable";
      j["decider"] = m.decider.value.str();
      j["budget"] = m.budget.cap;
    }
    void operator()(const MembershipEnumerable& m) const {
      j["kind"] = "enumerable";
      j["enumerator"] = m.enumerator.value.str();
      j["budget"] = m.budget.cap;
    }
  };
  std::visit(Visitor{j}, spec.membership);
  return j;
}

inline std::string labeling_string(const Labeling& l) {
  std::string s;
  for (auto b : l) s += b ? '1' : '0';
  return s;
}

inline std::vector<Nat> parse_point_list(const std::string& csv) {
  std::vector<Nat> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(std::stoull(item));
  if (out.empty()) throw Error("empty point list");
  return out;
}

inline Learner parse_learner_spec(const std::string& spec, Nat cutoff, Nat budget) {
  if (spec == "const0") return constant_learner(false);
  if (spec == "const1") return constant_learner(true);
  if (spec.rfind("erm:", 0) == 0)
    return erm_learner(load_class_spec(spec.substr(4), budget), cutoff);
  throw Error("unknown learner spec '" + spec + "' (const0 | const1 | erm:<class-file>)");
}

inline ClassTarget parse_class_target(const std::string& ref, Nat budget) {
  if (ref.find(':') != std::string::npos) return ClassTarget::from_string(ref);
  const ClassSpec spec = load_class_spec(ref, budget);
  if (spec.is_all()) return ClassTarget::all(spec.base);
  if (spec.is_explicit()) return ClassTarget::explicit_members(spec.base, spec.explicit_indices());
  throw Error("machine-backed memberships have no arithmetization target");
}

inline std::string class_spec_text(const ClassSpec& spec) {
  std::string text = "base = " + base_name(spec.base) + "\n";
  if (spec.is_explicit()) {
    text += "membership = explicit: ";
    const auto& idx = spec.explicit_indices();
    for (size_t i = 0; i < idx.size(); ++i) text += (i ? "," : "") + std::to_string(idx[i]);
    text += "\n";
  } else if (spec.is_all()) {
    text += "membership = all\n";
  } else {
    throw Error("machine-backed memberships have no canonical text form");
  }
  return text;
}

}  // namespace cli_detail

// Runs one command line against the library and assembles the JSON report.
// Exit codes: 0 success, 1 domain error, 2 usage error.
inline DispatchResult dispatch(const std::vector<std::string>& args) {
  CLI::App app{"cpac: a workbench for computable PAC learning over a toy register machine"};
  app.require_subcommand(1);

  Nat budget = cli_detail::env_budget();
  Nat cutoff = kDefaultCutoff;
  bool no_timings = false;
  app.add_option("--budget", budget, "enumeration/step budget cap");
  app.add_option("--cutoff", cutoff, "index/stage cutoff for enumerated classes");
  app.add_flag("--no-timings", no_timings, "omit timings from the report");

  // machine run | machine enum
  auto* machine = app.add_subcommand("machine", "run the counter machine");
  std::string index_str, program_file;
  Nat input = 0, steps = 0;
  auto* mrun = machine->add_subcommand("run", "step-bounded run of phi_i");
  mrun->add_option("--index", index_str, "program index (decimal)");
  mrun->add_option("--program", program_file, "program text file (encoded to an index)");
  mrun->add_option("--input", input, "input value")->required();
  mrun->add_option("--steps", steps, "step budget s")->required();
  auto* menum = machine->add_subcommand("enum", "stage-s enumeration W_{j,s}");
  menum->add_option("--index", index_str, "program index (decimal)");
  menum->add_option("--program", program_file, "program text file (encoded to an index)");
  menum->add_option("--steps", steps, "stage s")->required();

  // class show | class restrict
  auto* cls = app.add_subcommand("class", "hypothesis class inspection");
  std::string class_file, points_csv;
  Nat preview = 8;
  auto* cshow = cls->add_subcommand("show", "parse and describe a class spec");
  cshow->add_option("--class", class_file, "class spec file")->required();
  cshow->add_option("--preview", preview, "hypotheses to preview");
  auto* crestrict = cls->add_subcommand("restrict", "restriction of the class to a point set");
  crestrict->add_option("--class", class_file, "class spec file")->required();
  crestrict->add_option("--points", points_csv, "comma-separated points")->required();

  // vc check | vc lower-bound
  auto* vc = app.add_subcommand("vc", "shattering and VC dimension");
  Nat vc_d = 1, domain_bound = 32;
  auto* vcheck = vc->add_subcommand("check", "does the class shatter the points");
  vcheck->add_option("--class", class_file, "class spec file")->required();
  vcheck->add_option("--points", points_csv, "comma-separated points")->required();
  auto* vlower = vc->add_subcommand("lower-bound", "search a shattered witness set");
  vlower->add_option("--class", class_file, "class spec file")->required();
  vlower->add_option("--d", vc_d, "witness size")->required();
  vlower->add_option("--domain", domain_bound, "search points below this bound")->required();

  // erm
  std::string sample_file;
  auto* erm_cmd = app.add_subcommand("erm", "empirical risk minimization");
  erm_cmd->add_option("--class", class_file, "class spec file")->required();
  erm_cmd->add_option("--sample", sample_file, "sample file")->required();

  // learn synth
  auto* learn = app.add_subcommand("learn", "learner assembly");
  auto* synth = learn->add_subcommand("synth", "ERM learner with a VC sample-complexity bound");
  synth->add_option("--class", class_file, "class spec file")->required();

  // pac verify
  std::string dist_file;
  Nat pac_m = 1, pac_a = 2, pac_b = 2, trials = 100000, seed = 0;
  bool exact_mode = false, mc_mode = false;
  auto* pac = app.add_subcommand("pac", "strong PAC inequality checks");
  auto* pverify = pac->add_subcommand("verify", "verify the inequality for the class's ERM learner");
  pverify->add_flag("--exact", exact_mode, "full enumeration, exact probability");
  pverify->add_flag("--mc", mc_mode, "Monte-Carlo estimate");
  pverify->add_option("--class", class_file, "class spec file")->required();
  pverify->add_option("--dist", dist_file, "distribution file")->required();
  pverify->add_option("--m", pac_m, "sample length")->required();
  pverify->add_option("--a", pac_a, "accuracy denominator (epsilon = 1/a)")->required();
  pverify->add_option("--b", pac_b, "confidence denominator (delta = 1/b)")->required();
  pverify->add_option("--seed", seed, "Monte-Carlo seed");
  pverify->add_option("--trials", trials, "Monte-Carlo trials");

  // extract-erm
  std::string mode_str = "exact";
  Nat ext_k = 20, ext_b = 2, inject_m = 0;
  auto* extract = app.add_subcommand("extract-erm", "recover an ERM from a strong learner");
  extract->add_option("--class", class_file, "class spec file")->required();
  extract->add_option("--sample", sample_file, "sample file")->required();
  extract->add_option("--mode", mode_str, "exact | randomized");
  extract->add_option("--k", ext_k, "randomized draws");
  extract->add_option("--b", ext_b, "confidence denominator");
  extract->add_option("--seed", seed, "randomized-mode seed");
  extract->add_option("--inject-m", inject_m, "override the learner's sample complexity");

  // nfl
  std::string learner_spec;
  Nat nfl_m = 2;
  auto* nfl = app.add_subcommand("nfl", "computable no-free-lunch adversary");
  nfl->add_option("--learner", learner_spec, "const0 | const1 | erm:<class-file>")->required();
  nfl->add_option("--m", nfl_m, "sample length m (needs 2m points)")->required();
  nfl->add_option("--points", points_csv, "comma-separated points, exactly 2m")->required();

  // family fin | rec
  auto* family = app.add_subcommand("family", "reduction families at a stage");
  Nat stage = 0;
  auto* ffin = family->add_subcommand("fin", "finite-support family of the cardinality reduction");
  ffin->add_option("--program", program_file, "program text file");
  ffin->add_option("--index", index_str, "program index (decimal)");
  ffin->add_option("--stage", stage, "stage s")->required();
  auto* frec = family->add_subcommand("rec", "threshold family of the computability reduction");
  frec->add_option("--program", program_file, "program text file");
  frec->add_option("--index", index_str, "program index (decimal)");
  frec->add_option("--stage", stage, "stage s")->required();

  // arith emit | classify | eval
  auto* arith = app.add_subcommand("arith", "first-order statements of learnability");
  std::string kind = "vc", class_ref, formula_file;
  Nat eval_bound = 8;
  auto* aemit = arith->add_subcommand("emit", "emit a learnability statement");
  aemit->add_option("--kind", kind, "vc | pac | scpac");
  aemit->add_option("--class", class_ref,
                    "class spec file or inline all:BASE | explicit:BASE:... | fin-family:J | "
                    "rec-family:J")
      ->required();
  aemit->add_option("--d", vc_d, "VC bound for --kind vc");
  auto* aclassify = arith->add_subcommand("classify", "prenex classification of a formula");
  aclassify->add_option("--formula", formula_file, "formula file")->required();
  auto* aeval = arith->add_subcommand("eval", "bounded evaluation of a formula");
  aeval->add_option("--formula", formula_file, "formula file")->required();
  aeval->add_option("--bound", eval_bound, "cap for unbounded quantifiers")->required();

  DispatchResult result;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    result.out = app.help();
    result.exit_code = 0;
    return result;
  } catch (const CLI::ParseError& e) {
    result.err = std::string(e.what()) + "\n";
    result.exit_code = 2;
    return result;
  }

  Json report;
  report["schema"] = kSchemaVersion;
  const auto started = std::chrono::steady_clock::now();

  const auto resolve_index = [&]() -> ProgramIndex {
    if (!index_str.empty() && !program_file.empty())
      throw Error("give --index or --program, not both");
    if (!index_str.empty()) return ProgramIndex(BigNat(index_str));
    if (!program_file.empty()) return encode_program(load_program_file(program_file));
    throw Error("one of --index or --program is required");
  };

  try {
    if (mrun->parsed()) {
      report["command"] = "machine run";
      const ProgramIndex idx = resolve_index();
      report["inputs"] = {{"index", idx.value.str()}, {"input", input}, {"steps", steps}};
      const RunOutcome out = run_bounded(idx, input, StepBudget{steps});
      Json r;
      r["outcome"] = out.halted ? "halted" : "still-running";
      if (out.halted) r["output"] = out.output;
      r["steps_used"] = out.steps;
      report["result"] = r;
    } else if (menum->parsed()) {
      report["command"] = "machine enum";
      const ProgramIndex idx = resolve_index();
      report["inputs"] = {{"index", idx.value.str()}, {"steps", steps}};
      const std::vector<Nat> w = ce_stage(idx, StepBudget{steps});
      report["result"] = {{"elements", w}, {"count", w.size()}};
    } else if (cshow->parsed()) {
      report["command"] = "class show";
      const ClassSpec spec = load_class_spec(class_file, budget);
      report["inputs"] = {{"class", class_file}};
      Json r;
      r["base"] = base_name(spec.base);
      r["membership"] = cli_detail::membership_json(spec);
      Json previews = Json::array();
      const std::vector<Nat> members =
          spec.is_explicit() ? spec.explicit_indices() : members_below(spec, std::min(cutoff, preview));
      for (size_t i = 0; i < members.size() && i < preview; ++i) {
        Json h = cli_detail::hypothesis_json(decode_hypothesis(spec.base, members[i]));
        h["index"] = members[i];
        previews.push_back(h);
      }
      r["preview"] = previews;
      report["result"] = r;
    } else if (crestrict->parsed()) {
      report["command"] = "class restrict";
      const ClassSpec spec = load_class_spec(class_file, budget);
      const std::vector<Nat> points = cli_detail::parse_point_list(points_csv);
      report["inputs"] = {{"class", class_file}, {"points", points}, {"cutoff", cutoff}};
      const auto labelings = restrict_class(spec, points, cutoff);
      Json ls = Json::array();
      for (const auto& l : labelings) ls.push_back(cli_detail::labeling_string(l));
      report["result"] = {{"labelings", ls},
                          {"count", labelings.size()},
                          {"exact", restriction_is_exact(spec)}};
    } else if (vcheck->parsed()) {
      report["command"] = "vc check";
      const ClassSpec spec = load_class_spec(class_file, budget);
      const std::vector<Nat> points = cli_detail::parse_point_list(points_csv);
      report["inputs"] = {{"class", class_file}, {"points", points}, {"cutoff", cutoff}};
      report["result"] = {{"shattered", shatters(spec, points, cutoff)}};
    } else if (vlower->parsed()) {
      report["command"] = "vc lower-bound";
      const ClassSpec spec = load_class_spec(class_file, budget);
      report["inputs"] = {{"class", class_file},
                          {"d", vc_d},
                          {"domain", domain_bound},
                          {"cutoff", cutoff}};
      const auto witness = vc_lower_bound(spec, vc_d, domain_bound, cutoff);
      Json r;
      if (witness) {
        r["witness"] = *witness;
        r["verified"] = shatters(spec, *witness, cutoff);
      } else {
        r["witness"] = nullptr;
      }
      report["result"] = r;
    } else if (erm_cmd->parsed()) {
      report["command"] = "erm";
      const ClassSpec spec = load_class_spec(class_file, budget);
      const Sample s = load_sample(sample_file);
      report["inputs"] = {{"class", class_file}, {"sample", sample_file}, {"cutoff", cutoff}};
      const Hypothesis h = erm(spec, s, cutoff);
      Json r;
      r["hypothesis"] = cli_detail::hypothesis_json(h);
      r["index"] = encode_hypothesis(spec.base, h);
      r["empirical_error"] = rational_to_string(empirical_error(h, s));
      report["result"] = r;
    } else if (synth->parsed()) {
      report["command"] = "learn synth";
      const ClassSpec spec = load_class_spec(class_file, budget);
      report["inputs"] = {{"class", class_file}};
      const VcResult vc_res = vc_exact(spec);
      if (vc_res.infinite) throw InfiniteVc("class has infinite VC dimension");
      const Learner learner = scpac_learner(spec, cutoff);
      Json r;
      r["vc"] = vc_res.value;
      Json table = Json::array();
      for (Nat ab : {Nat{1}, Nat{2}, Nat{4}, Nat{8}}) {
        table.push_back(
            {{"a", ab}, {"b", ab}, {"m", (*learner.sample_complexity)(ab, ab)}});
      }
      r["sample_complexity"] = table;
      r["proper"] = true;
      report["result"] = r;
    } else if (pverify->parsed()) {
      report["command"] = "pac verify";
      if (exact_mode == mc_mode) throw Error("choose exactly one of --exact / --mc");
      const ClassSpec spec = load_class_spec(class_file, budget);
      const FiniteDistribution dist = load_distribution(dist_file);
      const Learner learner = erm_learner(spec, cutoff);
      report["inputs"] = {{"class", class_file}, {"dist", dist_file}, {"m", pac_m},
                          {"a", pac_a},         {"b", pac_b}};
      Json r;
      if (exact_mode) {
        const PacExactResult res = pac_verify_exact(learner, spec, dist, pac_m, pac_a, pac_b, budget);
        r["mode"] = "exact";
        r["p"] = rational_to_string(res.p);
        r["satisfied"] = res.satisfied;
      } else {
        report["inputs"]["seed"] = seed;
        report["inputs"]["trials"] = trials;
        const PacMcResult res = pac_verify_mc(learner, spec, dist, pac_m, pac_a, pac_b, trials, seed);
        r["mode"] = "mc";
        r["p_hat"] = rational_to_string(res.p_hat);
        r["ci"] = rational_to_string(res.ci);
      }
      r["min_risk"] = rational_to_string(min_true_error(spec, dist));
      report["result"] = r;
    } else if (extract->parsed()) {
      report["command"] = "extract-erm";
      const ClassSpec spec = load_class_spec(class_file, budget);
      const Sample s = load_sample(sample_file);
      report["inputs"] = {{"class", class_file},
                          {"sample", sample_file},
                          {"mode", mode_str},
                          {"b", ext_b}};
      Learner learner = erm_learner(spec, cutoff);
      if (inject_m > 0) {
        learner.sample_complexity = [inject_m](Nat, Nat) { return inject_m; };
        report["inputs"]["inject_m"] = inject_m;
      } else {
        const VcResult vc_res = vc_exact(spec);
        if (vc_res.infinite) throw InfiniteVc("class has infinite VC dimension");
        learner.sample_complexity = [d = vc_res.value](Nat aa, Nat bb) {
          return sample_complexity_bound(d, aa, bb);
        };
      }
      ExtractMode mode;
      if (mode_str == "exact") {
        mode = ExtractMode::Exact;
      } else if (mode_str == "randomized") {
        mode = ExtractMode::Randomized;
        report["inputs"]["k"] = ext_k;
        report["inputs"]["seed"] = seed;
      } else {
        throw Error("--mode must be exact or randomized");
      }
      const Hypothesis h = extract_erm(learner, s, mode, ext_k, seed, ext_b, budget);
      Json r;
      r["hypothesis"] = cli_detail::hypothesis_json(h);
      r["empirical_error"] = rational_to_string(empirical_error(h, s));
      r["m"] = (*learner.sample_complexity)(s.pairs.size() + 1, ext_b);
      report["result"] = r;
    } else if (nfl->parsed()) {
      report["command"] = "nfl";
      const Learner learner = cli_detail::parse_learner_spec(learner_spec, cutoff, budget);
      const std::vector<Nat> points = cli_detail::parse_point_list(points_csv);
      report["inputs"] = {{"learner", learner_spec}, {"m", nfl_m}, {"points", points}};
      const NflResult res = nfl_adversary(learner, nfl_m, points, budget);
      std::string g;
      for (auto b : res.labeling) g += b ? '1' : '0';
      report["result"] = {{"g", g},
                          {"p", rational_to_string(res.p)},
                          {"p_at_least_1_7", res.p >= Rational(1, 7)}};
    } else if (ffin->parsed() || frec->parsed()) {
      report["command"] = ffin->parsed() ? "family fin" : "family rec";
      const ProgramIndex idx = resolve_index();
      report["inputs"] = {{"index", idx.value.str()}, {"stage", stage}};
      const ClassSpec spec = ffin->parsed() ? fin_family(idx, StepBudget{stage})
                                            : rec_family(idx, StepBudget{stage});
      report["result"] = {{"base", base_name(spec.base)},
                          {"indices", spec.explicit_indices()},
                          {"count", spec.explicit_indices().size()},
                          {"class_text", cli_detail::class_spec_text(spec)}};
    } else if (aemit->parsed()) {
      report["command"] = "arith emit";
      const ClassTarget target = cli_detail::parse_class_target(class_ref, budget);
      report["inputs"] = {{"class", target.to_string()}, {"kind", kind}};
      FormulaPtr f;
      if (kind == "vc") {
        report["inputs"]["d"] = vc_d;
        f = build_vc_lt(target, vc_d);
      } else if (kind == "pac") {
        f = build_pac(target);
      } else if (kind == "scpac") {
        f = build_scpac(target);
      } else {
        throw Error("--kind must be vc, pac, or scpac");
      }
      report["result"] = {{"formula", formula_to_string(f)},
                          {"classification", classify(f).to_string()}};
    } else if (aclassify->parsed()) {
      report["command"] = "arith classify";
      report["inputs"] = {{"formula", formula_file}};
      const FormulaPtr f = parse_formula(read_file(formula_file));
      report["result"] = {{"classification", classify(f).to_string()}};
    } else if (aeval->parsed()) {
      report["command"] = "arith eval";
      report["inputs"] = {{"formula", formula_file}, {"bound", eval_bound}};
      const FormulaPtr f = parse_formula(read_file(formula_file));
      report["result"] = {{"value", eval_bounded(f, eval_bound)}};
    } else {
      throw Error("no command given");
    }
    report["budget"] = budget;
  } catch (const Error& e) {
    report["error"] = {{"kind", cli_detail::error_kind(e)}, {"message", e.what()}};
    result.exit_code = 1;
  } catch (const std::exception& e) {
    report["error"] = {{"kind", "error"}, {"message", e.what()}};
    result.exit_code = 1;
  }

  if (!no_timings) {
    const auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - started);
    report["timings"] = {{"total_us", elapsed.count()}};
  }
  result.out = report.dump(2) + "\n";
  return result;
}

}  // namespace cpac::cli
