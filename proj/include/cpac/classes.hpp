#pragma once

#include <algorithm>
#include <set>
#include <variant>
#include <vector>

#include "cpac/hypothesis.hpp"

namespace cpac {

/*
 * Hypothesis classes as index sets over a base-class decoding. Decidable
 * membership gives a DR class, enumerable membership an RER class; explicit
 * finite lists and the full base round out the representations the
 * workbench manipulates.
 */

inline constexpr Nat kDefaultBudget = 1'000'000;
inline constexpr Nat kDefaultCutoff = 4096;

// Per-call step allowance for membership machines: a fixed budget, or
// doubling from `initial` up to `cap`.
struct BudgetPolicy {
  Nat initial = kDefaultBudget;
  bool doubling = false;
  Nat cap = kDefaultBudget;

  std::vector<Nat> ladder() const {
    std::vector<Nat> out{initial};
    if (doubling)
      for (Nat s = initial; s < cap / 2; s *= 2) out.push_back(s * 2);
    if (out.back() < cap && doubling) out.push_back(cap);
    return out;
  }
};

struct MembershipAll {};

struct MembershipExplicit {
  std::vector<Nat> indices;  // kept sorted and deduplicated

  static MembershipExplicit of(std::vector<Nat> xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return MembershipExplicit{std::move(xs)};
  }
};

// Total decider: phi(i) = 0 means non-member, any other output member.
// Failure to halt within the budget policy is a reported error.
struct MembershipDecidable {
  ProgramIndex decider;
  BudgetPolicy budget;
};

// Enumerable index set W_e; an index is visible iff it enters the stage
// approximation within the budget. "Not yet enumerated" is the documented
// under-approximation, not an error.
struct MembershipEnumerable {
  ProgramIndex enumerator;
  BudgetPolicy budget;
};

using Membership =
    std::variant<MembershipAll, MembershipExplicit, MembershipDecidable, MembershipEnumerable>;

struct ClassSpec {
  Base base = Base::Thd;
  Membership membership = MembershipAll{};

  bool is_all() const { return std::holds_alternative<MembershipAll>(membership); }
  bool is_explicit() const { return std::holds_alternative<MembershipExplicit>(membership); }
  const std::vector<Nat>& explicit_indices() const {
    return std::get<MembershipExplicit>(membership).indices;
  }
};

inline ClassSpec all_of(Base base) { return ClassSpec{base, MembershipAll{}}; }

inline ClassSpec explicit_class(Base base, std::vector<Nat> indices) {
  return ClassSpec{base, MembershipExplicit::of(std::move(indices))};
}

// Membership of index i at the spec's budget. Decidable deciders must halt
// within the policy; enumerable membership is the stage approximation.
inline bool member_at_budget(const ClassSpec& spec, Nat i) {
  struct Visitor {
    Nat i;
    bool operator()(const MembershipAll&) const { return true; }
    bool operator()(const MembershipExplicit& m) const {
      return std::binary_search(m.indices.begin(), m.indices.end(), i);
    }
    bool operator()(const MembershipDecidable& m) const {
      for (Nat s : m.budget.ladder()) {
        const RunOutcome out = run_raw(m.decider, i, StepBudget{s});
        if (out.halted) return out.output != 0;
      }
      throw BudgetExhausted("membership decider did not halt on index " + std::to_string(i) +
                            " within " + std::to_string(m.budget.cap) + " steps");
    }
    bool operator()(const MembershipEnumerable& m) const {
      for (Nat s : m.budget.ladder())
        if (run_bounded(m.enumerator, i, StepBudget{s}).halted) return true;
      return false;
    }
  };
  return std::visit(Visitor{i}, spec.membership);
}

// Member indices below the cutoff. Exact for explicit lists (cutoff ignored
// there beyond filtering nothing); a prefix view for everything else.
inline std::vector<Nat> members_below(const ClassSpec& spec, Nat cutoff) {
  if (spec.is_explicit()) return spec.explicit_indices();
  std::vector<Nat> out;
  for (Nat i = 0; i < cutoff; ++i)
    if (member_at_budget(spec, i)) out.push_back(i);
  return out;
}

// True when restrict() below is exact rather than a cutoff
// under-approximation.
inline bool restriction_is_exact(const ClassSpec& spec) {
  if (spec.is_explicit()) return true;
  if (!spec.is_all()) return false;
  return spec.base != Base::Init;
}

using Labeling = std::vector<std::uint8_t>;  // aligned with the sorted point set

namespace detail {

inline Labeling labeling_of(const Hypothesis& h, const std::vector<Nat>& points) {
  Labeling l(points.size());
  for (size_t k = 0; k < points.size(); ++k)
    l[k] = static_cast<std::uint8_t>(evaluate(h, points[k]));
  return l;
}

// Indices that exhaust every restriction behavior of an all-membership base
// on points bounded by `maxp`.
inline std::vector<Nat> all_base_representatives(Base base, Nat maxp, Nat cutoff) {
  std::vector<Nat> out;
  switch (base) {
    case Base::Thd:
      for (Nat t = 0; t <= maxp + 1; ++t) out.push_back(t);
      break;
    case Base::ThdOmega:
      for (Nat i = 0; i <= maxp + 2; ++i) out.push_back(i);
      break;
    case Base::Ivl:
      for (Nat lo = 0; lo <= maxp + 1; ++lo)
        for (Nat hi = lo + 1; hi <= maxp + 2; ++hi)
          out.push_back(encode_interval(Interval{lo, hi}));
      break;
    case Base::Fin:
      for (Nat i = 0; i < detail::fin_block_offset(std::min<Nat>(maxp, 58) + 2); ++i)
        out.push_back(i);
      break;
    case Base::Init:
      for (Nat s = 0; s < cutoff; ++s) out.push_back(s);
      break;
  }
  return out;
}

}  // namespace detail

// The restriction of the class to X: the set of labelings realized by
// members. Exact for explicit lists and for all-membership structured bases
// (breakpoint scan); for INIT and machine-backed memberships it is a
// cutoff-bounded under-approximation, monotone in the cutoff.
inline std::set<Labeling> restrict_class(const ClassSpec& spec, const std::vector<Nat>& points_in,
                                         Nat cutoff) {
  if (points_in.empty()) throw Error("restrict needs a nonempty point set");
  std::vector<Nat> points = points_in;
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  std::set<Labeling> out;
  if (spec.is_all() && spec.base == Base::Fin) {
    // Every labeling occurs: enumerate 2^|X| directly.
    if (points.size() > 20) throw Error("restrict: point set too large for FIN enumeration");
    Labeling l(points.size());
    for (Nat mask = 0; mask < (Nat{1} << points.size()); ++mask) {
      for (size_t k = 0; k < points.size(); ++k)
        l[k] = static_cast<std::uint8_t>((mask >> k) & 1);
      out.insert(l);
    }
    return out;
  }

  std::vector<Nat> indices;
  if (spec.is_explicit()) {
    indices = spec.explicit_indices();
  } else if (spec.is_all()) {
    indices = detail::all_base_representatives(spec.base, points.back(), cutoff);
  } else {
    indices = members_below(spec, cutoff);
  }
  for (Nat i : indices) out.insert(detail::labeling_of(decode_hypothesis(spec.base, i), points));
  return out;
}

/*
 * Stage-s surrogate of the halting class: for i < s, h_i^s labels 2i with 1
 * and 2i+1 with 1 exactly when run_bounded(i, i, s) halted, everything else
 * 0, realized as FIN hypotheses. Pointwise monotone in s. The class itself
 * is the standing example of hypotheses that are not uniformly computable
 * in their index, so only these stage snapshots exist here.
 */
inline ClassSpec halt_class_stage(StepBudget s) {
  std::vector<Nat> indices;
  for (Nat i = 0; i < s.steps; ++i) {
    FiniteSupport f;
    f.cut = 2 * i + 1;
    f.prefix.assign(f.cut + 1, 0);
    f.prefix[2 * i] = 1;
    if (run_bounded(ProgramIndex(i), i, s).halted) f.prefix[2 * i + 1] = 1;
    f.tail = 0;
    indices.push_back(encode_finite_support(f));
  }
  return explicit_class(Base::Fin, std::move(indices));
}

}  // namespace cpac
