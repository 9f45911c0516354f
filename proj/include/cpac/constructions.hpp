#pragma once

#include "cpac/learn.hpp"

namespace cpac {

/*
 * Constructive procedures: ERM extraction from a strong learner, the
 * computable no-free-lunch adversary, and the two reduction families with
 * their consistency/membership bridges.
 */

enum class ExtractMode { Exact, Randomized };

/*
 * Recovers an empirical risk minimizer for S from any learner A that comes
 * with a sample-complexity function. Builds the empirical distribution D_S,
 * fixes a = |S| + 1, computes m = A.sampleComplexity(a, b), and feeds A
 * candidate training sequences of length m drawn from D_S:
 *
 *   Exact        all |supp(D_S)|^m sequences; the result is A(S^) for the
 *                first S^ (in lexicographic sequence order) minimizing
 *                L_S(A(S^)). For an order-invariant A the enumeration runs
 *                per multiset, whose nondecreasing representatives appear
 *                exactly in first-occurrence order of the full enumeration.
 *   Randomized   k i.i.d. draws from D_S^m; if A genuinely satisfies the
 *                strong PAC inequality at (a, b, m), the result fails to
 *                minimize with probability at most (1/b)^k.
 */
inline Hypothesis extract_erm(const Learner& a, const Sample& s, ExtractMode mode, Nat k = 20,
                              Nat seed = 0, Nat b = 2, Nat budget = kDefaultBudget) {
  require_nonempty(s);
  if (!a.sample_complexity)
    throw MissingSampleComplexity("extract_erm needs a learner with a sample-complexity function");
  if (b == 0) throw Error("extract_erm needs b >= 1");
  const FiniteDistribution d = empirical_distribution(s);
  const Nat acc = s.pairs.size() + 1;
  const Nat m = (*a.sample_complexity)(acc, b);
  if (m == 0) throw Error("sample complexity returned 0");

  std::optional<Hypothesis> best;
  Rational best_err;
  const auto consider = [&](const std::vector<Nat>& picks) {
    Hypothesis h = a.map(detail::sample_from_picks(d, picks));
    const Rational err = empirical_error(h, s);
    if (!best || err < best_err) {
      best = std::move(h);
      best_err = err;
    }
  };

  if (mode == ExtractMode::Exact) {
    detail::check_enumeration_budget(d.atoms.size(), m, budget, "extract_erm");
    if (a.order_invariant)
      detail::for_each_multiset(d.atoms.size(), m, consider);
    else
      detail::for_each_sequence(d.atoms.size(), m, consider);
  } else {
    if (k == 0) throw Error("randomized extraction needs k >= 1");
    AtomSampler sampler(d, seed);
    std::vector<Nat> picks(m);
    for (Nat t = 0; t < k; ++t) {
      for (Nat j = 0; j < m; ++j) picks[j] = sampler.draw_atom();
      consider(picks);
    }
  }
  return *best;
}

struct NflResult {
  std::vector<std::uint8_t> labeling;  // aligned with the sorted point set
  Rational p;                          // Prob_{S ~ D^m}[ L_D(A(S)) >= 1/8 ]
};

/*
 * The computable no-free-lunch adversary. For every labeling g of the 2m
 * points of X it builds the distribution uniform over the graph of g and
 * computes exactly p(g) = Prob_{S ~ D^m}[ L_D(A(S)) >= 1/8 ], returning the
 * lexicographically smallest maximizer. The no-free-lunch argument puts the
 * maximum at 1/7 or above for every learner.
 */
inline NflResult nfl_adversary(const Learner& a, Nat m, const std::vector<Nat>& points_in,
                               Nat budget = kDefaultBudget) {
  if (m == 0) throw Error("nfl_adversary needs m >= 1");
  std::vector<Nat> points = points_in;
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() != 2 * m) throw Error("nfl_adversary needs exactly 2m distinct points");
  const Nat n = points.size();
  if (n > 20) throw Error("nfl_adversary: point set too large");
  {
    BigNat work = BigNat(1) << n;
    for (Nat i = 0; i < m; ++i) work *= n;
    if (work > budget)
      throw EnumerationBudgetExceeded("nfl_adversary: 2^" + std::to_string(n) + " * " +
                                      std::to_string(n) + "^" + std::to_string(m) +
                                      " evaluations exceed budget " + std::to_string(budget));
  }

  std::optional<NflResult> best;
  for (Nat gmask = 0; gmask < (Nat{1} << n); ++gmask) {
    // lexicographic order of labelings = numeric order with the first
    // point's label in the most significant position
    std::vector<std::uint8_t> g(n);
    for (Nat i = 0; i < n; ++i) g[i] = static_cast<std::uint8_t>((gmask >> (n - 1 - i)) & 1);
    std::vector<DistAtom> atoms;
    for (Nat i = 0; i < n; ++i) atoms.push_back(DistAtom{points[i], g[i], Rational(1, n)});
    const FiniteDistribution dist = FiniteDistribution::make(std::move(atoms));

    Rational p = 0;
    const Rational w(1, n);
    const auto tally = [&](const std::vector<Nat>& picks, const Rational& weight) {
      if (true_error(a.map(detail::sample_from_picks(dist, picks)), dist) >= Rational(1, 8))
        p += weight;
    };
    if (a.order_invariant) {
      const BigNat m_fact = detail::factorial(m);
      detail::for_each_multiset(n, m, [&](const std::vector<Nat>& picks) {
        std::vector<Nat> counts(n, 0);
        for (Nat i : picks) ++counts[i];
        Rational weight(m_fact, 1);
        for (Nat i = 0; i < n; ++i) weight /= Rational(detail::factorial(counts[i]), 1);
        for (Nat i = 0; i < m; ++i) weight *= w;
        tally(picks, weight);
      });
    } else {
      Rational weight = 1;
      for (Nat i = 0; i < m; ++i) weight *= w;
      detail::for_each_sequence(n, m, [&](const std::vector<Nat>& picks) { tally(picks, weight); });
    }
    if (!best || p > best->p) best = NflResult{g, p};
  }
  return *best;
}

/*
 * The finite-support reduction family: stage s of
 *
 *     H_j = { h_i : i <= |W_j| }   over the FIN base,
 *
 * i.e. the explicit class with indices { n : n <= |W_{j,s}| }. Monotone in
 * s; if W_j is finite of size k the family stabilizes at {h_0, ..., h_k},
 * and if W_j is infinite the stages grow without bound toward all of FIN.
 */
inline ClassSpec fin_family(const ProgramIndex& j, StepBudget s) {
  const Nat size = ce_stage(j, s).size();
  std::vector<Nat> indices;
  for (Nat n = 0; n <= size; ++n) indices.push_back(n);
  return explicit_class(Base::Fin, std::move(indices));
}

// The threshold reduction family: stage s of H_j = {h_i : i in W_j} u
// {h_omega} over the THD_OMEGA base. Monotone in s.
inline ClassSpec rec_family(const ProgramIndex& j, StepBudget s) {
  std::vector<Nat> indices{0};  // h_omega
  for (Nat i : ce_stage(j, s)) indices.push_back(i + 1);
  return explicit_class(Base::ThdOmega, std::move(indices));
}

// Threshold membership oracle for a family that always contains h_omega.
using ThresholdMembership = std::function<bool(Nat)>;

inline ThresholdMembership threshold_membership_of(const ClassSpec& spec) {
  if (spec.base != Base::ThdOmega && spec.base != Base::Thd)
    throw Error("threshold membership needs a threshold base");
  return [spec](Nat t) {
    const Nat index = spec.base == Base::ThdOmega ? t + 1 : t;
    try {
      return member_at_budget(spec, index);
    } catch (const Error& e) {
      throw OracleFailure(e.what());
    }
  };
}

/*
 * Decides S in B_H for a threshold family H = {h_t : t member} u {h_omega}
 * by the four-case analysis:
 *
 *   1. every label is 1                         -> consistent via h_omega
 *   2. some (x,0) and (x',1) with x <= x'       -> inconsistent
 *   3. every label is 0, minimum point x_min    -> consistent iff some
 *                                                  member t <= x_min
 *   4. otherwise all 1-points lie below all
 *      0-points; with x0 = max 1-point and
 *      x1 = min 0-point                         -> consistent iff some
 *                                                  member t with x0 < t <= x1
 *
 * Boundary inequalities follow h_t(x) = 1 iff x < t and are pinned by the
 * brute-force equivalence tests.
 */
inline bool consistency_by_cases(const ThresholdMembership& member, const Sample& s) {
  require_nonempty(s);
  bool any_zero = false, any_one = false;
  std::optional<Nat> max_one, min_zero, min_point;
  for (const auto& [x, y] : s.pairs) {
    if (!min_point || x < *min_point) min_point = x;
    if (y != 0) {
      any_one = true;
      if (!max_one || x > *max_one) max_one = x;
    } else {
      any_zero = true;
      if (!min_zero || x < *min_zero) min_zero = x;
    }
  }
  if (!any_zero) return true;                       // case 1
  if (any_one && *min_zero <= *max_one) return false;  // case 2, including equal points
  if (!any_one) {                                   // case 3
    for (Nat t = 0; t <= *min_point; ++t)
      if (member(t)) return true;
    return false;
  }
  for (Nat t = *max_one + 1; t <= *min_zero; ++t)   // case 4
    if (member(t)) return true;
  return false;
}

using SampleConsistencyOracle = std::function<bool(const Sample&)>;

// Recovers threshold membership from a consistency oracle for the family:
// h_t is a member exactly when the two-point sample ((t-1,1),(t,0)) is
// consistent, and for t = 0 when ((0,0)) is. h_omega never answers these
// queries, so the oracle isolates the thresholds.
inline bool membership_from_consistency(const SampleConsistencyOracle& oracle, Nat t) {
  Sample query;
  if (t == 0)
    query.pairs = {{0, 0}};
  else
    query.pairs = {{t - 1, 1}, {t, 0}};
  return oracle(query);
}

}  // namespace cpac
