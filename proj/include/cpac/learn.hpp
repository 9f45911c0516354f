#pragma once

#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>

#include "cpac/vc.hpp"

namespace cpac {

// A labeled sequence; repetitions are allowed and meaningful.
struct Sample {
  std::vector<std::pair<Nat, std::uint8_t>> pairs;

  size_t size() const { return pairs.size(); }
  bool operator==(const Sample&) const = default;
};

inline void require_nonempty(const Sample& s) {
  if (s.pairs.empty()) throw Error("empty sample");  // L_S divides by |S|
}

inline Nat max_point(const Sample& s) {
  Nat m = 0;
  for (const auto& [x, y] : s.pairs)
    if (x > m) m = x;
  return m;
}

struct DistAtom {
  Nat x = 0;
  std::uint8_t y = 0;
  Rational w;
};

// Rational-weighted distribution with finite support over X x Y.
// Invariants: atoms pairwise distinct, weights positive, total exactly 1.
struct FiniteDistribution {
  std::vector<DistAtom> atoms;

  static FiniteDistribution make(std::vector<DistAtom> atoms) {
    FiniteDistribution d{std::move(atoms)};
    if (d.atoms.empty()) throw Error("distribution needs at least one atom");
    Rational total = 0;
    for (size_t i = 0; i < d.atoms.size(); ++i) {
      if (d.atoms[i].w <= 0) throw Error("distribution weights must be positive");
      total += d.atoms[i].w;
      for (size_t j = i + 1; j < d.atoms.size(); ++j)
        if (d.atoms[i].x == d.atoms[j].x && d.atoms[i].y == d.atoms[j].y)
          throw Error("distribution atoms must be pairwise distinct");
    }
    if (total != 1) throw Error("distribution weights must sum to exactly 1, got " +
                                rational_to_string(total));
    return d;
  }

  Nat max_point() const {
    Nat m = 0;
    for (const auto& a : atoms)
      if (a.x > m) m = a.x;
    return m;
  }
};

// D_S: the empirical distribution of a sample, duplicates merged by adding
// up their probabilities.
inline FiniteDistribution empirical_distribution(const Sample& s) {
  require_nonempty(s);
  std::map<std::pair<Nat, std::uint8_t>, Nat> counts;
  for (const auto& p : s.pairs) ++counts[p];
  std::vector<DistAtom> atoms;
  for (const auto& [key, c] : counts)
    atoms.push_back(DistAtom{key.first, key.second, Rational(c, s.pairs.size())});
  return FiniteDistribution::make(std::move(atoms));
}

// L_S(h) = |{(x,y) in S : h(x) != y}| / |S|, exactly.
inline Rational empirical_error(const Hypothesis& h, const Sample& s) {
  require_nonempty(s);
  Nat mismatches = 0;
  for (const auto& [x, y] : s.pairs)
    if (evaluate(h, x) != (y != 0)) ++mismatches;
  return Rational(mismatches, s.pairs.size());
}

// L_D(h) = P_{(x,y) ~ D}[h(x) != y], exactly.
inline Rational true_error(const Hypothesis& h, const FiniteDistribution& d) {
  Rational err = 0;
  for (const auto& a : d.atoms)
    if (evaluate(h, a.x) != (a.y != 0)) err += a.w;
  return err;
}

enum class Consistency { Yes, No, UnknownAtCutoff };

namespace detail {

// Number of sample pairs an in-class hypothesis must get wrong, at best.
// Returns the exact minimum for explicit classes and for the structured
// all-membership bases; nullopt when only a cutoff-bounded answer exists.
// All scans stay within breakpoints bounded by max(S) + 2, which exhaust
// the class behaviors on the sample points.
inline std::optional<Nat> exact_min_disagreements(const ClassSpec& spec, const Sample& s) {
  const auto count = [&](const Hypothesis& h) {
    Nat c = 0;
    for (const auto& [x, y] : s.pairs)
      if (evaluate(h, x) != (y != 0)) ++c;
    return c;
  };
  if (spec.is_explicit()) {
    std::optional<Nat> best;
    for (Nat i : spec.explicit_indices()) {
      const Nat c = count(decode_hypothesis(spec.base, i));
      if (!best || c < *best) best = c;
    }
    if (!best) return std::nullopt;  // empty class: no minimum exists
    return best;
  }
  if (!spec.is_all()) return std::nullopt;
  const Nat maxp = max_point(s);
  Nat best = s.pairs.size() + 1;
  switch (spec.base) {
    case Base::Thd:
    case Base::ThdOmega: {
      for (Nat t = 0; t <= maxp + 1; ++t) best = std::min(best, count(Threshold{t}));
      if (spec.base == Base::ThdOmega)
        best = std::min(best, count(Threshold{std::nullopt}));
      return best;
    }
    case Base::Ivl: {
      for (Nat lo = 0; lo <= maxp + 1; ++lo)
        for (Nat hi = lo + 1; hi <= maxp + 2; ++hi)
          best = std::min(best, count(Interval{lo, hi}));
      return best;
    }
    case Base::Fin: {
      // Only same-point label conflicts are unavoidable.
      std::map<Nat, std::pair<Nat, Nat>> by_x;
      for (const auto& [x, y] : s.pairs) (y != 0 ? by_x[x].second : by_x[x].first)++;
      Nat conflicts = 0;
      for (const auto& [x, c] : by_x) conflicts += std::min(c.first, c.second);
      return conflicts;
    }
    case Base::Init: return std::nullopt;  // needs a stage cutoff
  }
  return std::nullopt;
}

}  // namespace detail

// Whether some in-class hypothesis fits the sample exactly (the consistency
// set B_H). Definitive for explicit classes and structured all-membership
// bases; for INIT and machine-backed memberships a cutoff-bounded Yes is a
// certificate while a miss is only UnknownAtCutoff.
inline Consistency consistent(const ClassSpec& spec, const Sample& s, Nat cutoff = kDefaultCutoff) {
  require_nonempty(s);
  // No function at all fits a point labeled both ways.
  for (size_t i = 0; i < s.pairs.size(); ++i)
    for (size_t j = i + 1; j < s.pairs.size(); ++j)
      if (s.pairs[i].first == s.pairs[j].first && s.pairs[i].second != s.pairs[j].second)
        return Consistency::No;
  if (const auto exact = detail::exact_min_disagreements(spec, s))
    return *exact == 0 ? Consistency::Yes : Consistency::No;
  if (spec.is_explicit() && spec.explicit_indices().empty()) return Consistency::No;
  const std::vector<Nat> members = members_below(spec, cutoff);
  for (Nat i : members) {
    const Hypothesis h = decode_hypothesis(spec.base, i);
    bool fits = true;
    for (const auto& [x, y] : s.pairs)
      if (evaluate(h, x) != (y != 0)) {
        fits = false;
        break;
      }
    if (fits) return Consistency::Yes;
  }
  return Consistency::UnknownAtCutoff;
}

namespace detail {

// Minimal disagreement level i* established by walking label vectors z in
// increasing Hamming distance from y^n, lexicographically within each
// level, asking consistency for (x^n, z). A consistent z at distance i
// exists exactly when some member has empirical error i/n.
inline Nat min_level_by_z_walk(const ClassSpec& spec, const Sample& s, Nat cutoff) {
  const size_t n = s.pairs.size();
  if (n > 20) throw Error("consistency z-walk limited to samples of length 20");
  Nat ymask = 0;
  for (size_t k = 0; k < n; ++k)
    if (s.pairs[k].second) ymask |= Nat{1} << (n - 1 - k);  // bit order = lex order
  bool unknown_seen = false;
  for (size_t level = 0; level <= n; ++level) {
    for (Nat zbits = 0; zbits < (Nat{1} << n); ++zbits) {
      if (static_cast<size_t>(std::popcount(zbits ^ ymask)) != level) continue;
      Sample flipped = s;
      for (size_t k = 0; k < n; ++k)
        flipped.pairs[k].second = static_cast<std::uint8_t>((zbits >> (n - 1 - k)) & 1);
      switch (consistent(spec, flipped, cutoff)) {
        case Consistency::Yes: return level;
        case Consistency::UnknownAtCutoff: unknown_seen = true; break;
        case Consistency::No: break;
      }
    }
  }
  if (unknown_seen)
    throw UnknownAtCutoff("no consistent relabeling found below cutoff " + std::to_string(cutoff));
  throw NoHypothesisFound("class has no hypothesis to minimize over");
}

// Index bound such that the smallest-index empirical minimizer of any
// sample with points <= maxp is guaranteed to appear below it.
inline Nat minimizer_index_bound(Base base, Nat maxp, Nat cutoff) {
  switch (base) {
    case Base::Thd: return maxp + 2;
    case Base::ThdOmega: return maxp + 3;
    case Base::Ivl: {
      Nat bound = 0;
      for (Nat lo = 0; lo <= maxp + 1; ++lo)
        bound = std::max(bound, encode_interval(Interval{lo, maxp + 2}) + 1);
      return bound;
    }
    case Base::Fin: return fin_block_offset(std::min<Nat>(maxp, 58) + 2);
    case Base::Init: return cutoff;
  }
  throw Error("bad base");
}

}  // namespace detail

/*
 * Empirical risk minimization. The minimal achievable disagreement count
 * i_star is established as in the z-walk above (levels i = 0, 1, ..., n of
 * label vectors, first consistent level wins; for the exact-scan bases the
 * walk's outcome i_star = n * min_h L_S(h) is computed directly, which
 * returns the identical hypothesis since the z that witnesses a level does
 * not enter the result). The returned hypothesis is the member with the
 * smallest index among those with empirical error exactly i_star / n.
 */
inline Hypothesis erm(const ClassSpec& spec, const Sample& s, Nat cutoff = kDefaultCutoff) {
  require_nonempty(s);
  const size_t n = s.pairs.size();
  Nat level;
  if (const auto exact = detail::exact_min_disagreements(spec, s)) {
    level = *exact;
  } else if (spec.is_explicit() && spec.explicit_indices().empty()) {
    throw NoHypothesisFound("class has no hypothesis to minimize over");
  } else {
    level = detail::min_level_by_z_walk(spec, s, cutoff);
  }
  const Rational target(level, n);
  std::vector<Nat> candidates;
  if (spec.is_explicit()) {
    candidates = spec.explicit_indices();
  } else {
    const Nat bound = spec.is_all()
                          ? detail::minimizer_index_bound(spec.base, max_point(s), cutoff)
                          : cutoff;
    for (Nat i = 0; i < bound; ++i)
      if (spec.is_all() || member_at_budget(spec, i)) candidates.push_back(i);
  }
  for (Nat i : candidates) {
    const Hypothesis h = decode_hypothesis(spec.base, i);
    if (empirical_error(h, s) == target) return h;
  }
  throw UnknownAtCutoff("no member with empirical error " + rational_to_string(target) +
                        " found below cutoff");
}

/*
 * A total computable sample-size bound for ERM at accuracy 1/a and
 * confidence 1/b over a class of VC dimension d:
 *
 *     m(d, a, b) = 64 a^2 (d (bits(a) + 6) + bits(b) + 3)
 *
 * with bits(n) the bit length of n. This is an integer-arithmetic majorant
 * of the standard agnostic uniform-convergence bound
 * 32 a^2 (d ln(64 a^2) + ln(8 b)), using ln n <= 0.7 bits(n); the slack is
 * deliberate, as all verification of the PAC inequality happens exactly and
 * never through this formula. Nondecreasing in d, a, and b.
 */
inline Nat sample_complexity_bound(Nat d, Nat a, Nat b) {
  if (a == 0 || b == 0) throw Error("sample_complexity needs a, b >= 1");
  const auto bits = [](Nat n) { return static_cast<Nat>(std::bit_width(n)); };
  const BigNat m = BigNat(64) * a * a * (BigNat(d) * (bits(a) + 6) + bits(b) + 3);
  return to_nat_checked(m, "sample complexity");
}

// A total map from samples to hypotheses, optionally with a total
// sample-complexity function and a class it is proper for. order_invariant
// asserts that the output depends on the sample only through its multiset,
// which licenses aggregated enumeration in the verifiers.
struct Learner {
  std::function<Hypothesis(const Sample&)> map;
  std::optional<std::function<Nat(Nat, Nat)>> sample_complexity;
  std::optional<ClassSpec> proper_for;
  bool order_invariant = false;
};

inline Learner constant_learner(bool label) {
  Learner a;
  a.map = [label](const Sample&) -> Hypothesis {
    return label ? Threshold{std::nullopt} : Threshold{Nat{0}};
  };
  a.order_invariant = true;
  return a;
}

inline Learner erm_learner(const ClassSpec& spec, Nat cutoff = kDefaultCutoff) {
  Learner a;
  a.map = [spec, cutoff](const Sample& s) { return erm(spec, s, cutoff); };
  a.proper_for = spec;
  a.order_invariant = true;  // the returned minimizer depends on the multiset only
  return a;
}

// ERM paired with the VC sample-complexity bound; the SCPAC learner of the
// class. Requires finite VC dimension.
inline Learner scpac_learner(const ClassSpec& spec, Nat cutoff = kDefaultCutoff) {
  const VcResult vc = vc_exact(spec);
  if (vc.infinite) throw InfiniteVc("class has infinite VC dimension");
  Learner a = erm_learner(spec, cutoff);
  a.sample_complexity = [d = vc.value](Nat aa, Nat bb) { return sample_complexity_bound(d, aa, bb); };
  return a;
}

// Exact minimum risk over the class, where a breakpoint or member scan can
// certify it; UnknownAtCutoff otherwise.
inline Rational min_true_error(const ClassSpec& spec, const FiniteDistribution& d) {
  const auto risk = [&](const Hypothesis& h) { return true_error(h, d); };
  std::optional<Rational> best;
  const auto consider = [&](const Hypothesis& h) {
    const Rational r = risk(h);
    if (!best || r < *best) best = r;
  };
  if (spec.is_explicit()) {
    for (Nat i : spec.explicit_indices()) consider(decode_hypothesis(spec.base, i));
    if (!best) throw NoHypothesisFound("empty class has no minimum risk");
    return *best;
  }
  if (!spec.is_all() || spec.base == Base::Init)
    throw UnknownAtCutoff("exact minimum risk needs an explicit or structured class");
  const Nat maxp = d.max_point();
  switch (spec.base) {
    case Base::Thd:
    case Base::ThdOmega:
      for (Nat t = 0; t <= maxp + 1; ++t) consider(Threshold{t});
      if (spec.base == Base::ThdOmega) consider(Threshold{std::nullopt});
      break;
    case Base::Ivl:
      for (Nat lo = 0; lo <= maxp + 1; ++lo)
        for (Nat hi = lo + 1; hi <= maxp + 2; ++hi) consider(Interval{lo, hi});
      break;
    case Base::Fin: {
      Rational conflicts = 0;
      std::map<Nat, std::pair<Rational, Rational>> by_x;
      for (const auto& a : d.atoms) (a.y != 0 ? by_x[a.x].second : by_x[a.x].first) += a.w;
      for (const auto& [x, c] : by_x) conflicts += std::min(c.first, c.second);
      return conflicts;
    }
    default: break;
  }
  return *best;
}

struct PacExactResult {
  Rational p;       // Prob_{S ~ D^m}[ L_D(A(S)) > min_h L_D(h) + 1/a ]
  bool satisfied;   // p < 1/b
};

namespace detail {

inline BigNat factorial(Nat n) {
  BigNat f = 1;
  for (Nat k = 2; k <= n; ++k) f *= k;
  return f;
}

// Walks every length-m multiset over the atom indices [0, k) in the order
// of their nondecreasing representative sequences; that order agrees with
// first appearance in the lexicographic enumeration of all sequences.
template <class Fn>
void for_each_multiset(Nat k, Nat m, Fn&& fn) {
  std::vector<Nat> pick(m, 0);
  while (true) {
    fn(const_cast<const std::vector<Nat>&>(pick));
    Nat j = m;
    while (j > 0 && pick[j - 1] == k - 1) --j;
    if (j == 0) return;
    const Nat v = pick[j - 1] + 1;
    for (Nat t = j - 1; t < m; ++t) pick[t] = v;
  }
}

template <class Fn>
void for_each_sequence(Nat k, Nat m, Fn&& fn) {
  std::vector<Nat> pick(m, 0);
  while (true) {
    fn(const_cast<const std::vector<Nat>&>(pick));
    Nat j = m;
    while (j > 0 && pick[j - 1] == k - 1) --j;
    if (j == 0) return;
    ++pick[j - 1];
    for (Nat t = j; t < m; ++t) pick[t] = 0;
  }
}

inline Sample sample_from_picks(const FiniteDistribution& d, const std::vector<Nat>& picks) {
  Sample s;
  s.pairs.reserve(picks.size());
  for (Nat i : picks) s.pairs.push_back({d.atoms[i].x, d.atoms[i].y});
  return s;
}

inline void check_enumeration_budget(size_t support, Nat m, Nat budget, const char* what) {
  BigNat total = 1;
  for (Nat i = 0; i < m; ++i) {
    total *= support;
    if (total > budget)
      throw EnumerationBudgetExceeded(std::string(what) + ": " + std::to_string(support) + "^" +
                                       std::to_string(m) + " sequences exceed budget " +
                                       std::to_string(budget));
  }
}

}  // namespace detail

/*
 * Exact verification of the strong PAC inequality
 *
 *     Prob_{S ~ D^m}[ L_D(A(S)) > min_{h in H}(L_D(h)) + 1/a ] < 1/b
 *
 * by full enumeration of the |supp(D)|^m length-m sequences with their
 * product weights. For an order-invariant learner the enumeration is
 * aggregated per multiset with exact multinomial weights, which sums to the
 * identical rational.
 */
inline PacExactResult pac_verify_exact(const Learner& a, const ClassSpec& spec,
                                       const FiniteDistribution& d, Nat m, Nat acc, Nat conf,
                                       Nat budget = kDefaultBudget) {
  if (m == 0) throw Error("pac_verify needs m >= 1");
  if (acc == 0 || conf == 0) throw Error("pac_verify needs a, b >= 1");
  detail::check_enumeration_budget(d.atoms.size(), m, budget, "pac_verify_exact");
  const Rational threshold = min_true_error(spec, d) + Rational(1, acc);
  const Nat k = d.atoms.size();
  Rational p = 0;
  Rational total = 0;
  if (a.order_invariant) {
    const BigNat m_fact = detail::factorial(m);
    detail::for_each_multiset(k, m, [&](const std::vector<Nat>& picks) {
      std::vector<Nat> counts(k, 0);
      Rational w(m_fact, 1);
      for (Nat i : picks) ++counts[i];
      for (Nat i = 0; i < k; ++i) {
        w /= Rational(detail::factorial(counts[i]), 1);
        for (Nat c = 0; c < counts[i]; ++c) w *= d.atoms[i].w;
      }
      total += w;
      if (true_error(a.map(detail::sample_from_picks(d, picks)), d) > threshold) p += w;
    });
  } else {
    detail::for_each_sequence(k, m, [&](const std::vector<Nat>& picks) {
      Rational w = 1;
      for (Nat i : picks) w *= d.atoms[i].w;
      total += w;
      if (true_error(a.map(detail::sample_from_picks(d, picks)), d) > threshold) p += w;
    });
  }
  if (total != 1) throw Error("enumeration weights did not sum to 1");
  return PacExactResult{p, p < Rational(1, conf)};
}

// Deterministic seeded sampler over the atoms of a distribution, drawing
// uniformly below the common denominator (rejection keeps it unbiased).
class AtomSampler {
 public:
  AtomSampler(const FiniteDistribution& d, Nat seed) : rng_(seed) {
    BigNat den = 1;
    for (const auto& a : d.atoms) den = lcm(den, denominator(a.w));
    den_ = to_nat_checked(den, "distribution common denominator");
    Nat acc = 0;
    for (const auto& a : d.atoms) {
      acc += to_nat_checked(BigNat(numerator(a.w)) * (den / denominator(a.w)), "atom weight");
      cum_.push_back(acc);
    }
  }

  Nat draw_atom() {
    const Nat u = uniform_below(den_);
    size_t lo = 0;
    while (cum_[lo] <= u) ++lo;
    return lo;
  }

  Nat uniform_below(Nat n) {
    const Nat limit = UINT64_MAX - UINT64_MAX % n;
    Nat u;
    do {
      u = rng_();
    } while (u >= limit);
    return u % n;
  }

 private:
  std::mt19937_64 rng_;
  Nat den_ = 1;
  std::vector<Nat> cum_;
};

struct PacMcResult {
  Rational p_hat;
  Rational ci;  // four-sigma binomial half width (rational upper bound)
};

// Monte-Carlo estimate of the same probability; a sampling cross-check of
// pac_verify_exact, deterministic for a given seed.
inline PacMcResult pac_verify_mc(const Learner& a, const ClassSpec& spec,
                                 const FiniteDistribution& d, Nat m, Nat acc, Nat conf, Nat trials,
                                 Nat seed) {
  (void)conf;
  if (m == 0 || trials == 0) throw Error("pac_verify_mc needs m, trials >= 1");
  const Rational threshold = min_true_error(spec, d) + Rational(1, acc);
  AtomSampler sampler(d, seed);
  std::map<std::vector<Nat>, bool> memo;  // multiset -> event, for invariant learners
  Nat hits = 0;
  std::vector<Nat> picks(m);
  for (Nat t = 0; t < trials; ++t) {
    for (Nat j = 0; j < m; ++j) picks[j] = sampler.draw_atom();
    bool bad;
    if (a.order_invariant) {
      std::vector<Nat> key = picks;
      std::sort(key.begin(), key.end());
      const auto it = memo.find(key);
      if (it != memo.end()) {
        bad = it->second;
      } else {
        bad = true_error(a.map(detail::sample_from_picks(d, key)), d) > threshold;
        memo.emplace(std::move(key), bad);
      }
    } else {
      bad = true_error(a.map(detail::sample_from_picks(d, picks)), d) > threshold;
    }
    if (bad) ++hits;
  }
  const Rational p_hat(hits, trials);
  const Rational spread = std::max(Rational(p_hat * (1 - p_hat)), Rational(1, trials));
  return PacMcResult{p_hat, 4 * sqrt_upper_bound(spread / trials)};
}

}  // namespace cpac
