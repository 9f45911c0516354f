#pragma once

// Test-only oracles, kept independent of the library's internal shortcuts:
// a direct scan over breakpoint-bounded hypotheses, and the label-vector
// walk for empirical risk minimization taken literally.

#include <bit>

#include "cpac/learn.hpp"

namespace cpac::oracle {

// Every in-class hypothesis whose behavior on points <= maxp matters,
// enumerated in index order.
inline std::vector<Hypothesis> bounded_hypotheses(const ClassSpec& spec, Nat maxp, Nat cutoff) {
  std::vector<Hypothesis> out;
  if (spec.is_explicit()) {
    for (Nat i : spec.explicit_indices()) out.push_back(decode_hypothesis(spec.base, i));
    return out;
  }
  if (spec.is_all()) {
    switch (spec.base) {
      case Base::Thd:
        for (Nat t = 0; t <= maxp + 2; ++t) out.push_back(Threshold{t});
        return out;
      case Base::ThdOmega:
        out.push_back(Threshold{std::nullopt});
        for (Nat t = 0; t <= maxp + 2; ++t) out.push_back(Threshold{t});
        return out;
      case Base::Ivl:
        for (Nat lo = 0; lo <= maxp + 1; ++lo)
          for (Nat hi = lo + 1; hi <= maxp + 2; ++hi) out.push_back(Interval{lo, hi});
        return out;
      case Base::Fin:
        for (Nat i = 0; i < ((Nat{1} << (maxp + 4)) - 4); ++i)
          out.push_back(decode_hypothesis(Base::Fin, i));
        return out;
      case Base::Init:
        for (Nat s = 0; s < cutoff; ++s) out.push_back(InitStage{s});
        return out;
    }
  }
  for (Nat i : members_below(spec, cutoff)) out.push_back(decode_hypothesis(spec.base, i));
  return out;
}

inline Rational brute_min_empirical(const ClassSpec& spec, const Sample& s, Nat cutoff) {
  std::optional<Rational> best;
  for (const Hypothesis& h : bounded_hypotheses(spec, max_point(s), cutoff)) {
    const Rational e = empirical_error(h, s);
    if (!best || e < *best) best = e;
  }
  if (!best) throw NoHypothesisFound("empty class");
  return *best;
}

// The minimization procedure taken literally: walk label vectors z by
// Hamming distance from y (lexicographic within a level), stop at the first
// consistent one, then return the first in-class hypothesis (by index) with
// empirical error exactly level/n.
inline Hypothesis erm_z_walk(const ClassSpec& spec, const Sample& s, Nat cutoff) {
  const size_t n = s.pairs.size();
  Nat ymask = 0;
  for (size_t k = 0; k < n; ++k)
    if (s.pairs[k].second) ymask |= Nat{1} << (n - 1 - k);
  bool unknown = false;
  for (size_t level = 0; level <= n; ++level) {
    for (Nat zbits = 0; zbits < (Nat{1} << n); ++zbits) {
      if (static_cast<size_t>(std::popcount(zbits ^ ymask)) != level) continue;
      Sample relabeled = s;
      for (size_t k = 0; k < n; ++k)
        relabeled.pairs[k].second = static_cast<std::uint8_t>((zbits >> (n - 1 - k)) & 1);
      const Consistency c = consistent(spec, relabeled, cutoff);
      if (c == Consistency::UnknownAtCutoff) unknown = true;
      if (c != Consistency::Yes) continue;
      const Rational target(level, n);
      if (spec.is_explicit()) {
        for (Nat i : spec.explicit_indices()) {
          const Hypothesis h = decode_hypothesis(spec.base, i);
          if (empirical_error(h, s) == target) return h;
        }
      } else {
        for (Nat i = 0;; ++i) {
          if (!spec.is_all() && i >= cutoff) break;
          if (!member_at_budget(spec, i)) continue;
          const Hypothesis h = decode_hypothesis(spec.base, i);
          if (empirical_error(h, s) == target) return h;
        }
      }
      throw UnknownAtCutoff("no member attains the consistent level");
    }
  }
  if (unknown) throw UnknownAtCutoff("z-walk saw only unknowns");
  throw NoHypothesisFound("empty class");
}

inline Nat z_walk_level(const ClassSpec& spec, const Sample& s, Nat cutoff) {
  const Rational scaled =
      empirical_error(erm_z_walk(spec, s, cutoff), s) * Rational(s.pairs.size(), 1);
  if (denominator(scaled) != 1) throw Error("level was not integral");
  return to_nat_checked(numerator(scaled), "level");
}

inline Sample random_sample(std::mt19937_64& rng, Nat max_len, Nat domain) {
  Sample s;
  const Nat n = 1 + rng() % max_len;
  for (Nat i = 0; i < n; ++i)
    s.pairs.push_back({rng() % domain, static_cast<std::uint8_t>(rng() % 2)});
  return s;
}

}  // namespace cpac::oracle
