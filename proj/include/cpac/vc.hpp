#pragma once

#include <optional>

#include "cpac/classes.hpp"

namespace cpac {

// True iff the restriction of the class to X realizes all 2^|X| labelings.
// For cutoff-bounded restrictions a true answer is a certificate; false
// only means "not shattered at this cutoff".
inline bool shatters(const ClassSpec& spec, const std::vector<Nat>& points, Nat cutoff) {
  if (points.empty()) throw Error("shatters needs a nonempty point set");
  if (points.size() > 20) throw Error("shatters: point set too large");
  const auto labelings = restrict_class(spec, points, cutoff);
  return labelings.size() == (size_t{1} << points.size());
}

struct VcResult {
  bool infinite = false;
  Nat value = 0;  // meaningful only when !infinite
};

namespace detail {

// Candidate points for an exhaustive shattering search over an explicit
// class: one point per region where some member can still change value.
inline Nat explicit_breakpoint_bound(const ClassSpec& spec) {
  Nat bound = 1;
  for (Nat i : spec.explicit_indices()) {
    const Nat bp = hypothesis_breakpoint(decode_hypothesis(spec.base, i));
    if (bp + 1 > bound) bound = bp + 1;
  }
  return bound + 1;  // one representative past the last breakpoint
}

inline bool any_subset_shattered(const ClassSpec& spec, const std::vector<Nat>& pool, Nat d,
                                 Nat cutoff, std::vector<Nat>& chosen, size_t from) {
  if (chosen.size() == d) return shatters(spec, chosen, cutoff);
  for (size_t k = from; k + (d - chosen.size()) <= pool.size(); ++k) {
    chosen.push_back(pool[k]);
    if (any_subset_shattered(spec, pool, d, cutoff, chosen, k + 1)) {
      chosen.pop_back();
      return true;
    }
    chosen.pop_back();
  }
  return false;
}

}  // namespace detail

/*
 * Exact VC dimension for the structured cases:
 *
 *   THD, THD_OMEGA   1   (thresholds are a chain; {0} is shattered)
 *   IVL              2   (a pair like {1, 2} is shattered, no triple:
 *                         the 1,0,1 labeling needs a hole in an interval)
 *   FIN with all     infinite (every finite set is shattered)
 *   INIT             1   (the stages form a pointwise-monotone chain, so no
 *                         pair ever gets both mixed labelings; {0} is
 *                         shattered since the empty program halts on 0)
 *   explicit finite  exhaustive search over breakpoint representatives,
 *                    depth-capped by log2 of the class size
 *
 * `domain_bound` = 0 lets the explicit search pick its own representative
 * bound from the member breakpoints; a positive bound that cannot cover the
 * representatives is DomainBoundTooSmall.
 */
inline VcResult vc_exact(const ClassSpec& spec, Nat domain_bound = 0) {
  if (spec.is_all()) {
    switch (spec.base) {
      case Base::Thd:
      case Base::ThdOmega: return VcResult{false, 1};
      case Base::Ivl: return VcResult{false, 2};
      case Base::Fin: return VcResult{true, 0};
      case Base::Init: return VcResult{false, 1};
    }
  }
  if (!spec.is_explicit())
    throw Error("vc_exact needs an all-membership structured base or an explicit finite class");

  const auto& members = spec.explicit_indices();
  if (members.empty()) return VcResult{false, 0};
  Nat depth_cap = 0;
  while ((size_t{1} << (depth_cap + 1)) <= members.size()) ++depth_cap;  // floor log2 |H|

  const Nat need = detail::explicit_breakpoint_bound(spec);
  if (domain_bound == 0) domain_bound = need;
  if (domain_bound < need)
    throw DomainBoundTooSmall("explicit VC search needs points below " + std::to_string(need) +
                              ", domain bound is " + std::to_string(domain_bound));
  std::vector<Nat> pool;
  for (Nat x = 0; x < domain_bound; ++x) pool.push_back(x);

  Nat dim = 0;
  std::vector<Nat> chosen;
  for (Nat d = 1; d <= depth_cap && d <= pool.size(); ++d) {
    if (!detail::any_subset_shattered(spec, pool, d, kDefaultCutoff, chosen, 0)) break;
    dim = d;
  }
  return VcResult{false, dim};
}

// Lexicographically smallest X of size d below the domain bound with
// shatters(spec, X, cutoff), if any. A miss is not a proof of VCdim < d.
inline std::optional<std::vector<Nat>> vc_lower_bound(const ClassSpec& spec, Nat d,
                                                      Nat domain_bound, Nat cutoff) {
  if (d == 0) throw Error("vc_lower_bound needs d >= 1");
  if (d > domain_bound) return std::nullopt;
  std::vector<Nat> chosen(d);
  // combinations of [0, domain_bound) in lexicographic order
  for (Nat k = 0; k < d; ++k) chosen[k] = k;
  while (true) {
    if (shatters(spec, chosen, cutoff)) return chosen;
    Nat k = d;
    while (k > 0 && chosen[k - 1] == domain_bound - (d - (k - 1))) --k;
    if (k == 0) return std::nullopt;
    ++chosen[k - 1];
    for (Nat j = k; j < d; ++j) chosen[j] = chosen[j - 1] + 1;
  }
}

}  // namespace cpac
