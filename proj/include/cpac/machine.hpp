#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cpac/coding.hpp"
#include "cpac/errors.hpp"

namespace cpac {

/*
 * A two-instruction counter machine over unbounded natural registers.
 *
 *     INC r      increment register r, advance to the next instruction
 *     DJZ r a    if register r is zero jump to address a,
 *                otherwise decrement r and advance
 *     HALT       stop immediately
 *
 * Addresses range over [0, n] for a program of n instructions; address n
 * (one past the end) halts. Input is placed in register 0, all other
 * registers start at zero, and the output is register 0 at the halt state.
 * One executed instruction is one step. Execution is deterministic.
 */

enum class OpCode : std::uint8_t { Inc, Djz, Halt };

struct Instruction {
  OpCode op = OpCode::Halt;
  Nat reg = 0;     // Inc, Djz
  Nat target = 0;  // Djz only

  bool operator==(const Instruction&) const = default;
};

struct Program {
  std::vector<Instruction> instructions;

  bool operator==(const Program&) const = default;

  // Every jump target must lie in [0, size]; size means halt.
  bool well_formed() const {
    for (const auto& ins : instructions)
      if (ins.op == OpCode::Djz && ins.target > instructions.size()) return false;
    return true;
  }
};

// Goedel number of a program. Decoding is total over all of N; encoding of
// big programs can exceed 64 bits, so indices are arbitrary-precision.
struct ProgramIndex {
  BigNat value;

  ProgramIndex() = default;
  explicit ProgramIndex(BigNat v) : value(std::move(v)) {}
  explicit ProgramIndex(Nat v) : value(v) {}

  bool operator==(const ProgramIndex&) const = default;
  auto operator<=>(const ProgramIndex& o) const { return value.compare(o.value); }
};

struct StepBudget {
  Nat steps = 0;
};

// The canonical diverging program: a single self-loop on register 1, which
// stays zero on every input. Invalid encodings decode to this program.
inline Program diverging_program() {
  return Program{{Instruction{OpCode::Djz, 1, 0}}};
}

/*
 * Goedel numbering.
 *
 * Per-instruction code (bijective over instructions):
 *
 *     HALT       ->  0
 *     INC r      ->  2r + 1
 *     DJZ r a    ->  2*pair(r, a) + 2
 *
 * The numbering of whole programs has four pages so that the small indices
 * reachable at low stage budgets contain usable programs. decode(i):
 *
 *     i = 0          the empty program (halts at once; the identity map)
 *     i = 1 + 3q     finite acceptor: halts exactly on the bit positions of
 *                    the mask q, diverges elsewhere (q = 0 accepts nothing)
 *     i = 2 + 3q     residue acceptor: with (u, v) = unpair(q), modulus
 *                    m = u + 1 and accept mask v mod 2^m, halts exactly on
 *                    inputs x with bit (x mod m) set in the mask
 *     i = 3 + 3q     general page: q is the list code of the instruction
 *                    codes; a list with any jump target out of range decodes
 *                    to the canonical diverging program
 *
 * Both acceptor pages expand to plain counter-machine programs (below), so
 * every index denotes an honest instruction list. encode() always emits the
 * general page; hence decode(encode(p)) = p for every well-formed p, while
 * encode(decode(i)) = i is not promised.
 */

inline BigNat instruction_code(const Instruction& ins) {
  switch (ins.op) {
    case OpCode::Halt: return 0;
    case OpCode::Inc: return 2 * BigNat(ins.reg) + 1;
    case OpCode::Djz: return 2 * cantor_pair(ins.reg, ins.target) + 2;
  }
  throw Error("bad opcode");
}

inline Instruction instruction_from_code(const BigNat& code) {
  if (code == 0) return Instruction{OpCode::Halt, 0, 0};
  if (code % 2 == 1) return Instruction{OpCode::Inc, to_nat_checked((code - 1) / 2, "register"), 0};
  auto [r, a] = cantor_unpair((code - 2) / 2);
  return Instruction{OpCode::Djz, to_nat_checked(r, "register"), to_nat_checked(a, "target")};
}

// Halts exactly on the finite set given by the bits of `mask`; output 0.
// Layout for highest accepted value H (len = H + 2):
//   pc j in [0, H]:  DJZ 0 (j accepted ? len : H + 1)
//   pc H + 1:        DJZ 1 (H + 1)            ; diverge
inline Program finite_acceptor_program(const BigNat& mask) {
  if (mask == 0) return diverging_program();
  const Nat high = static_cast<Nat>(msb(mask));
  Program p;
  for (Nat j = 0; j <= high; ++j) {
    const Nat target = bit_test(mask, static_cast<unsigned>(j)) ? high + 2 : high + 1;
    p.instructions.push_back(Instruction{OpCode::Djz, 0, target});
  }
  p.instructions.push_back(Instruction{OpCode::Djz, 1, high + 1});
  return p;
}

// Halts exactly on inputs x with bit (x mod modulus) set in `mask`; output 0.
// Layout (len = modulus + 2):
//   pc j in [0, modulus):  DJZ 0 (j accepted ? len : modulus + 1)
//   pc modulus:            DJZ 1 0              ; next lap
//   pc modulus + 1:        DJZ 1 (modulus + 1)  ; diverge
inline Program residue_acceptor_program(Nat modulus, const BigNat& mask) {
  if (modulus == 0) throw Error("residue acceptor needs a positive modulus");
  Program p;
  for (Nat j = 0; j < modulus; ++j) {
    const Nat target = bit_test(mask, static_cast<unsigned>(j)) ? modulus + 2 : modulus + 1;
    p.instructions.push_back(Instruction{OpCode::Djz, 0, target});
  }
  p.instructions.push_back(Instruction{OpCode::Djz, 1, 0});
  p.instructions.push_back(Instruction{OpCode::Djz, 1, modulus + 1});
  return p;
}

inline Program decode_program(const ProgramIndex& index) {
  if (index.value == 0) return Program{};
  const BigNat q = (index.value - 1) / 3;
  switch (static_cast<int>((index.value - 1) % 3)) {
    case 0: return finite_acceptor_program(q);
    case 1: {
      auto [u, v] = cantor_unpair(q);
      const Nat modulus = to_nat_checked(u, "residue modulus") + 1;
      if (modulus > 1u << 20) return diverging_program();  // mask bits must stay addressable
      const BigNat mask = v & ((BigNat(1) << modulus) - 1);
      return residue_acceptor_program(modulus, mask);
    }
    default: {
      std::vector<BigNat> codes = decode_list(q);
      Program p;
      try {
        for (const BigNat& c : codes) p.instructions.push_back(instruction_from_code(c));
      } catch (const Error&) {
        return diverging_program();
      }
      if (!p.well_formed()) return diverging_program();
      return p;
    }
  }
}

inline ProgramIndex encode_program(const Program& p) {
  std::vector<BigNat> codes;
  codes.reserve(p.instructions.size());
  for (const auto& ins : p.instructions) codes.push_back(instruction_code(ins));
  return ProgramIndex(3 * encode_list(codes) + 3);
}

// Indices of the standing test programs.
inline ProgramIndex identity_index() { return ProgramIndex(Nat{0}); }

inline ProgramIndex diverger_index() { return encode_program(diverging_program()); }

inline ProgramIndex finite_acceptor_index(const std::vector<Nat>& accepted) {
  BigNat mask = 0;
  for (Nat x : accepted) bit_set(mask, static_cast<unsigned>(x));
  return ProgramIndex(1 + 3 * mask);
}

inline ProgramIndex residue_acceptor_index(Nat modulus, const std::vector<Nat>& residues) {
  if (modulus == 0) throw Error("residue acceptor needs a positive modulus");
  BigNat mask = 0;
  for (Nat r : residues) bit_set(mask, static_cast<unsigned>(r % modulus));
  return ProgramIndex(2 + 3 * cantor_pair(modulus - 1, mask));
}

// --- execution ---------------------------------------------------------

struct RunOutcome {
  bool halted = false;
  Nat output = 0;
  Nat steps = 0;  // instructions executed (debug counter for budget exactness)
};

namespace detail {

struct DenseRegs {
  std::vector<Nat> v;
  explicit DenseRegs(Nat count) : v(count, 0) {}
  Nat& at(Nat r) { return v[r]; }
};

// Fallback for decoded programs that name astronomically large registers.
struct SparseRegs {
  std::map<Nat, Nat> m;
  explicit SparseRegs(Nat) {}
  Nat& at(Nat r) { return m[r]; }
};

template <class Regs>
RunOutcome run_steps(const Program& p, Nat input, Nat max_steps, Regs regs) {
  regs.at(0) = input;
  const Nat len = p.instructions.size();
  Nat pc = 0;
  Nat steps = 0;
  while (true) {
    if (pc >= len) return RunOutcome{true, regs.at(0), steps};
    if (steps == max_steps) return RunOutcome{false, 0, steps};
    const Instruction& ins = p.instructions[pc];
    ++steps;
    switch (ins.op) {
      case OpCode::Inc:
        ++regs.at(ins.reg);
        ++pc;
        break;
      case OpCode::Djz: {
        Nat& r = regs.at(ins.reg);
        if (r == 0) {
          pc = ins.target;
        } else {
          --r;
          ++pc;
        }
        break;
      }
      case OpCode::Halt:
        return RunOutcome{true, regs.at(0), steps};
    }
  }
}

}  // namespace detail

// Pure step-bounded execution with no index/input/output conventions.
// This is the entry point for membership deciders and machine-backed
// hypothesis evaluation, where the step budget is a resource bound only.
inline RunOutcome run_program(const Program& p, Nat input, Nat max_steps) {
  Nat max_reg = 1;
  for (const auto& ins : p.instructions)
    if (ins.reg > max_reg) max_reg = ins.reg;
  if (max_reg < 4096)
    return detail::run_steps(p, input, max_steps, detail::DenseRegs(max_reg + 1));
  return detail::run_steps(p, input, max_steps, detail::SparseRegs(0));
}

inline RunOutcome run_raw(const ProgramIndex& i, Nat input, StepBudget s) {
  return run_program(decode_program(i), input, s.steps);
}

// The step-bounded run phi_{i,s}(x). Halted(y) iff the decoded program halts
// on x within s steps with output y and additionally i, x, y < s; otherwise
// StillRunning. Monotone in s: once Halted, Halted with the same value at
// every larger budget.
inline RunOutcome run_bounded(const ProgramIndex& i, Nat x, StepBudget s) {
  if (i.value >= s.steps || x >= s.steps) return RunOutcome{false, 0, 0};
  RunOutcome out = run_raw(i, x, s);
  if (!out.halted || out.output >= s.steps) return RunOutcome{false, 0, out.steps};
  return out;
}

// Stage-s approximation of the c.e. set W_j:
//   W_{j,s} = { x < s : run_bounded(j, x, s) halted }.
// Monotone in s by monotonicity of run_bounded.
inline std::vector<Nat> ce_stage(const ProgramIndex& j, StepBudget s) {
  std::vector<Nat> out;
  if (j.value >= s.steps) return out;
  const Program p = decode_program(j);
  for (Nat x = 0; x < s.steps; ++x) {
    const RunOutcome r = run_program(p, x, s.steps);
    if (r.halted && r.output < s.steps) out.push_back(x);
  }
  return out;
}

// --- line-oriented program text ----------------------------------------
//
// One instruction per line: `INC r`, `DJZ r a`, `HALT`. `#` starts a
// comment; blank lines are ignored. Opcodes are case-insensitive.

inline Program parse_program_text(std::istream& in) {
  Program p;
  std::string line;
  Nat line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    for (char& c : op) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const auto fail = [&](const std::string& msg) {
      throw ParseError("program line " + std::to_string(line_no) + ": " + msg);
    };
    if (op == "INC") {
      Nat r;
      if (!(ls >> r)) fail("INC needs a register");
      p.instructions.push_back(Instruction{OpCode::Inc, r, 0});
    } else if (op == "DJZ") {
      Nat r, a;
      if (!(ls >> r >> a)) fail("DJZ needs a register and a target");
      p.instructions.push_back(Instruction{OpCode::Djz, r, a});
    } else if (op == "HALT") {
      p.instructions.push_back(Instruction{OpCode::Halt, 0, 0});
    } else {
      fail("unknown opcode '" + op + "'");
    }
    std::string extra;
    if (ls >> extra) fail("trailing tokens");
  }
  if (!p.well_formed()) throw ParseError("jump target out of range");
  return p;
}

inline Program parse_program_text(const std::string& text) {
  std::istringstream in(text);
  return parse_program_text(in);
}

inline void print_program_text(const Program& p, std::ostream& out) {
  for (const auto& ins : p.instructions) {
    switch (ins.op) {
      case OpCode::Inc: out << "INC " << ins.reg << "\n"; break;
      case OpCode::Djz: out << "DJZ " << ins.reg << " " << ins.target << "\n"; break;
      case OpCode::Halt: out << "HALT\n"; break;
    }
  }
}

inline std::string program_to_text(const Program& p) {
  std::ostringstream out;
  print_program_text(p, out);
  return out.str();
}

}  // namespace cpac
