#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cpac/machine.hpp"

namespace cpac {

/*
 * Total binary classifiers over N. The closed-form evaluators are total by
 * construction; MachineBacked evaluation can exhaust its step budget, which
 * surfaces as BudgetExhausted, never as a default label.
 */

// h(x) = prefix[x] for x <= cut, tail for x > cut.
struct FiniteSupport {
  Nat cut = 0;
  std::vector<std::uint8_t> prefix;  // size cut + 1
  std::uint8_t tail = 0;

  bool operator==(const FiniteSupport&) const = default;
};

// h(x) = 1 iff lo < x < hi, with lo < hi.
struct Interval {
  Nat lo = 0;
  Nat hi = 1;

  bool operator==(const Interval&) const = default;
};

// h(x) = 1 iff x < t; t = nullopt is the all-ones hypothesis h_omega.
struct Threshold {
  std::optional<Nat> t;

  bool omega() const { return !t.has_value(); }
  bool operator==(const Threshold&) const = default;
};

// h_s(x) = 1 iff run_bounded(x, x, s) halted; support is contained in [0, s).
struct InitStage {
  Nat stage = 0;

  bool operator==(const InitStage&) const = default;
};

struct MachineBacked {
  ProgramIndex index;
  StepBudget budget;
};

using Hypothesis = std::variant<FiniteSupport, Interval, Threshold, InitStage, MachineBacked>;

inline bool evaluate(const Hypothesis& h, Nat x) {
  struct Visitor {
    Nat x;
    bool operator()(const FiniteSupport& f) const {
      return (x <= f.cut ? f.prefix[x] : f.tail) != 0;
    }
    bool operator()(const Interval& iv) const { return iv.lo < x && x < iv.hi; }
    bool operator()(const Threshold& t) const { return t.omega() || x < *t.t; }
    bool operator()(const InitStage& s) const {
      return run_bounded(ProgramIndex(x), x, StepBudget{s.stage}).halted;
    }
    bool operator()(const MachineBacked& m) const {
      const RunOutcome out = run_raw(m.index, x, m.budget);
      if (!out.halted)
        throw BudgetExhausted("machine-backed hypothesis " + m.index.value.str() +
                              " not total within " + std::to_string(m.budget.steps) + " steps");
      return out.output != 0;
    }
  };
  return std::visit(Visitor{x}, h);
}

/*
 * Base classes and their decoding functions C : N -> H^. Each decode is
 * total and the codings below are fixed so indices reproduce across runs.
 *
 *   FIN        indices are blocked by the cut: block c starts at
 *              offset(c) = 2^(c+2) - 4 and holds 2^(c+2) payloads; payload
 *              bit 0 is the tail label, bit 1+j the label at x = j.
 *   IVL        index = pair(lo, hi - lo - 1).
 *   THD        index i -> threshold i.
 *   THD_OMEGA  index 0 -> h_omega, index i + 1 -> threshold i.
 *   INIT       index s -> stage-s diagonal halting hypothesis.
 */

enum class Base { Fin, Ivl, Thd, ThdOmega, Init };

inline std::string base_name(Base b) {
  switch (b) {
    case Base::Fin: return "fin";
    case Base::Ivl: return "ivl";
    case Base::Thd: return "thd";
    case Base::ThdOmega: return "thd-omega";
    case Base::Init: return "init";
  }
  throw Error("bad base");
}

inline Base base_from_name(std::string name) {
  for (char& c : name) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '_') c = '-';
  }
  if (name == "fin") return Base::Fin;
  if (name == "ivl") return Base::Ivl;
  if (name == "thd") return Base::Thd;
  if (name == "thd-omega") return Base::ThdOmega;
  if (name == "init") return Base::Init;
  throw ParseError("unknown base class '" + name + "'");
}

namespace detail {

// First index of the FIN block with the given cut: 4*(2^cut - 1).
inline Nat fin_block_offset(Nat cut) {
  if (cut >= 61) throw Error("finite-support index exceeds 64-bit coding range");
  return (Nat{1} << (cut + 2)) - 4;
}

}  // namespace detail

inline FiniteSupport decode_finite_support(Nat index) {
  Nat cut = 0;
  while (cut < 61 && detail::fin_block_offset(cut + 1) <= index) ++cut;
  const Nat payload = index - detail::fin_block_offset(cut);
  FiniteSupport f;
  f.cut = cut;
  f.tail = static_cast<std::uint8_t>(payload & 1);
  f.prefix.resize(cut + 1);
  for (Nat j = 0; j <= cut; ++j)
    f.prefix[j] = static_cast<std::uint8_t>((payload >> (j + 1)) & 1);
  return f;
}

inline Nat encode_finite_support(const FiniteSupport& f) {
  if (f.prefix.size() != f.cut + 1) throw Error("finite-support prefix length mismatch");
  Nat payload = f.tail & 1;
  for (Nat j = 0; j <= f.cut; ++j) payload |= static_cast<Nat>(f.prefix[j] & 1) << (j + 1);
  return detail::fin_block_offset(f.cut) + payload;
}

inline Interval decode_interval(Nat index) {
  auto [lo, gap] = cantor_unpair(BigNat(index));
  return Interval{to_nat_checked(lo, "interval lo"), to_nat_checked(lo + gap + 1, "interval hi")};
}

inline Nat encode_interval(const Interval& iv) {
  if (iv.lo >= iv.hi) throw Error("interval needs lo < hi");
  return to_nat_checked(cantor_pair(iv.lo, iv.hi - iv.lo - 1), "interval index");
}

inline Hypothesis decode_hypothesis(Base base, Nat index) {
  switch (base) {
    case Base::Fin: return decode_finite_support(index);
    case Base::Ivl: return decode_interval(index);
    case Base::Thd: return Threshold{index};
    case Base::ThdOmega:
      return index == 0 ? Threshold{std::nullopt} : Threshold{index - 1};
    case Base::Init: return InitStage{index};
  }
  throw Error("bad base");
}

// Inverse of decode_hypothesis on canonically coded hypotheses of the base.
inline Nat encode_hypothesis(Base base, const Hypothesis& h) {
  switch (base) {
    case Base::Fin: return encode_finite_support(std::get<FiniteSupport>(h));
    case Base::Ivl: return encode_interval(std::get<Interval>(h));
    case Base::Thd: {
      const auto& t = std::get<Threshold>(h);
      if (t.omega()) throw Error("h_omega is not in the THD base");
      return *t.t;
    }
    case Base::ThdOmega: {
      const auto& t = std::get<Threshold>(h);
      return t.omega() ? 0 : *t.t + 1;
    }
    case Base::Init: return std::get<InitStage>(h).stage;
  }
  throw Error("bad base");
}

// Smallest point from which on the hypothesis is constant. Restriction
// behaviors on a finite X are exhausted by indices whose breakpoints stay
// below max(X) + 2; the vc and learn modules rely on this.
inline Nat hypothesis_breakpoint(const Hypothesis& h) {
  struct Visitor {
    Nat operator()(const FiniteSupport& f) const { return f.cut + 1; }
    Nat operator()(const Interval& iv) const { return iv.hi; }
    Nat operator()(const Threshold& t) const { return t.omega() ? 0 : *t.t; }
    Nat operator()(const InitStage& s) const { return s.stage; }
    Nat operator()(const MachineBacked&) const {
      throw Error("machine-backed hypotheses have no closed-form breakpoint");
    }
  };
  return std::visit(Visitor{}, h);
}

}  // namespace cpac
