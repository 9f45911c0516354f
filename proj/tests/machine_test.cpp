#include "cpac/machine.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cpac;

namespace {

Program parity_loop() {
  // Halts exactly on even inputs: subtract 2 per lap, odd inputs fall into
  // the self-loop at pc 3.
  return parse_program_text(
      "DJZ 0 4\n"
      "DJZ 0 3\n"
      "DJZ 1 0\n"
      "DJZ 1 3\n");
}

TEST(Machine, EmptyProgramIsIdentity) {
  // Hand trace: no instructions, so the machine halts in 0 steps with the
  // input still in register 0.
  const RunOutcome out = run_bounded(identity_index(), 5, StepBudget{100});
  EXPECT_TRUE(out.halted);
  EXPECT_EQ(out.output, 5u);
  EXPECT_EQ(out.steps, 0u);
}

TEST(Machine, ZeroBudgetNeverHalts) {
  // The convention i, x, y < s is unsatisfiable at s = 0.
  EXPECT_FALSE(run_bounded(identity_index(), 0, StepBudget{0}).halted);
  EXPECT_FALSE(run_bounded(diverger_index(), 3, StepBudget{0}).halted);
  EXPECT_FALSE(run_bounded(finite_acceptor_index({2, 5}), 2, StepBudget{0}).halted);
}

TEST(Machine, DivergerNeverHalts) {
  const ProgramIndex loop = diverger_index();
  EXPECT_FALSE(run_bounded(loop, 3, StepBudget{1000000}).halted);
  EXPECT_TRUE(ce_stage(loop, StepBudget{1000}).empty());
}

TEST(Machine, ConventionGatesIndexInputAndOutput) {
  // index 0, input 5, output 5: needs s > 5.
  EXPECT_FALSE(run_bounded(identity_index(), 5, StepBudget{5}).halted);
  EXPECT_TRUE(run_bounded(identity_index(), 5, StepBudget{6}).halted);
  // large index: never halts below its own value
  const ProgramIndex big = finite_acceptor_index({2, 5});
  ASSERT_LT(big.value, 2000);
  EXPECT_FALSE(run_bounded(big, 2, StepBudget{static_cast<Nat>(big.value)}).halted);
}

TEST(Machine, IdentityStageEnumeratesPrefix) {
  // The empty program halts on every input instantly, so W_{0,s} = [0, s).
  const std::vector<Nat> w = ce_stage(identity_index(), StepBudget{10});
  ASSERT_EQ(w.size(), 10u);
  for (Nat x = 0; x < 10; ++x) EXPECT_EQ(w[x], x);
}

TEST(Machine, ParityLoopHaltsExactlyOnEvens) {
  const Program p = parity_loop();
  for (Nat x = 0; x <= 40; ++x) {
    const RunOutcome out = run_program(p, x, 1000);
    EXPECT_EQ(out.halted, x % 2 == 0) << "x=" << x;
  }
}

TEST(Machine, ResidueAcceptorIndexMatchesHandBuiltParityLoop) {
  const ProgramIndex evens = residue_acceptor_index(2, {0});
  EXPECT_EQ(evens.value, 14);  // 2 + 3 * pair(1, 1)
  const std::vector<Nat> w = ce_stage(evens, StepBudget{64});
  ASSERT_FALSE(w.empty());
  for (Nat x : w) EXPECT_EQ(x % 2, 0u);
  // every even below two thirds of the stage has halted (3x/2 + 1 steps)
  for (Nat x = 0; x <= 40; x += 2)
    EXPECT_TRUE(std::binary_search(w.begin(), w.end(), x)) << "x=" << x;
}

TEST(Machine, FiniteAcceptorEnumeratesItsSet) {
  const ProgramIndex j = finite_acceptor_index({2, 5});
  EXPECT_EQ(j.value, 109);  // 1 + 3 * (2^2 + 2^5)
  const std::vector<Nat> w = ce_stage(j, StepBudget{2000});
  EXPECT_EQ(w, (std::vector<Nat>{2, 5}));
  // and the acceptance set is exact far beyond the stage used above
  const Program p = decode_program(j);
  for (Nat x = 0; x <= 200; ++x)
    EXPECT_EQ(run_program(p, x, 5000).halted, x == 2 || x == 5) << "x=" << x;
}

TEST(Machine, DecodeIsTotalAndDeterministic) {
  const Program p0 = decode_program(ProgramIndex(Nat{0}));
  EXPECT_TRUE(p0.instructions.empty());
  for (Nat i = 0; i < 500; ++i) {
    const Program a = decode_program(ProgramIndex(i));
    const Program b = decode_program(ProgramIndex(i));
    EXPECT_TRUE(a.well_formed());
    EXPECT_EQ(a, b);
  }
}

TEST(Machine, RoundTripAllProgramsUpToLengthTwo) {
  // All programs of length <= 2 over registers <= 3 and every legal target.
  std::vector<Instruction> alphabet1, alphabet2;
  const auto fill = [](std::vector<Instruction>& out, Nat len) {
    out.push_back(Instruction{OpCode::Halt, 0, 0});
    for (Nat r = 0; r <= 3; ++r) {
      out.push_back(Instruction{OpCode::Inc, r, 0});
      for (Nat a = 0; a <= len; ++a) out.push_back(Instruction{OpCode::Djz, r, a});
    }
  };
  fill(alphabet1, 1);
  fill(alphabet2, 2);

  EXPECT_EQ(decode_program(encode_program(Program{})), Program{});
  for (const auto& i1 : alphabet1) {
    const Program p{{i1}};
    EXPECT_EQ(decode_program(encode_program(p)), p);
  }
  for (const auto& i1 : alphabet2)
    for (const auto& i2 : alphabet2) {
      const Program p{{i1, i2}};
      EXPECT_EQ(decode_program(encode_program(p)), p);
    }
}

TEST(Machine, InvalidTargetsDecodeToDiverger) {
  // DJZ 0 7 alone: target 7 > length 1.
  const Program bad{{Instruction{OpCode::Djz, 0, 7}}};
  EXPECT_FALSE(bad.well_formed());
  const ProgramIndex i = encode_program(bad);
  EXPECT_EQ(decode_program(i), diverging_program());
}

TEST(Machine, StepMonotonicity) {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 400; ++trial) {
    const ProgramIndex i(rng() % 3000);
    const Nat x = rng() % 64;
    const Nat s = rng() % 256;
    const Nat s2 = s + rng() % 256;
    const RunOutcome at_s = run_bounded(i, x, StepBudget{s});
    const RunOutcome at_s2 = run_bounded(i, x, StepBudget{s2});
    if (at_s.halted) {
      ASSERT_TRUE(at_s2.halted);
      EXPECT_EQ(at_s.output, at_s2.output);
    }
  }
}

TEST(Machine, StageMonotonicity) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const ProgramIndex j(rng() % 2000);
    const Nat s = rng() % 128;
    const Nat s2 = s + rng() % 128;
    const std::vector<Nat> w1 = ce_stage(j, StepBudget{s});
    const std::vector<Nat> w2 = ce_stage(j, StepBudget{s2});
    for (Nat x : w1) EXPECT_TRUE(std::binary_search(w2.begin(), w2.end(), x));
  }
}

TEST(Machine, BudgetExactness) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const ProgramIndex i(rng() % 3000);
    const Nat x = rng() % 64;
    const Nat s = rng() % 512;
    const RunOutcome out = run_bounded(i, x, StepBudget{s});
    if (out.halted) EXPECT_LE(out.steps, s);
  }
}

TEST(Machine, TextFormatRoundTrip) {
  const Program p = parity_loop();
  EXPECT_EQ(parse_program_text(program_to_text(p)), p);
  const Program commented = parse_program_text(
      "# parity check\n"
      "DJZ 0 4   # branch on zero\n"
      "\n"
      "djz 0 3\n"
      "DJZ 1 0\n"
      "DJZ 1 3\n");
  EXPECT_EQ(commented, p);
  EXPECT_THROW(parse_program_text("BLORP 1"), ParseError);
  EXPECT_THROW(parse_program_text("DJZ 0 9"), ParseError);  // target out of range
  EXPECT_THROW(parse_program_text("INC"), ParseError);
}

TEST(Machine, HaltInstructionStops) {
  const Program p = parse_program_text("INC 0\nHALT\nINC 0\n");
  const RunOutcome out = run_program(p, 1, 100);
  EXPECT_TRUE(out.halted);
  EXPECT_EQ(out.output, 2u);
  EXPECT_EQ(out.steps, 2u);
}

}  // namespace
