#pragma once

#include <bit>
#include <map>
#include <memory>
#include <sstream>

#include "cpac/constructions.hpp"

namespace cpac {

/*
 * First-order statements about learnability, emitted as syntax trees with a
 * canonical S-expression form (docs/formula-grammar.md). Quantifiers are
 * either unbounded or carry an inclusive bound term; bounded quantifiers do
 * not count toward the prenex classification. Every atom is decidable once
 * all its variables are assigned, by reduction to machine runs, stage sets,
 * and hypothesis decoding.
 */

// What a hypothesis quantifier ranges over.
struct ClassTarget {
  enum class Kind { AllBase, Explicit, FinFamily, RecFamily };

  Kind kind = Kind::AllBase;
  Base base = Base::Thd;      // AllBase, Explicit
  std::vector<Nat> members;   // Explicit
  BigNat program;             // FinFamily, RecFamily: the index j

  static ClassTarget all(Base b) { return ClassTarget{Kind::AllBase, b, {}, 0}; }
  static ClassTarget explicit_members(Base b, std::vector<Nat> m) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    return ClassTarget{Kind::Explicit, b, std::move(m), 0};
  }
  static ClassTarget fin_family_of(BigNat j) {
    return ClassTarget{Kind::FinFamily, Base::Fin, {}, std::move(j)};
  }
  static ClassTarget rec_family_of(BigNat j) {
    return ClassTarget{Kind::RecFamily, Base::ThdOmega, {}, std::move(j)};
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::AllBase: return "all:" + base_name(base);
      case Kind::Explicit: {
        std::string s = "explicit:" + base_name(base) + ":";
        for (size_t i = 0; i < members.size(); ++i)
          s += (i ? "," : "") + std::to_string(members[i]);
        return s;
      }
      case Kind::FinFamily: return "fin-family:" + program.str();
      case Kind::RecFamily: return "rec-family:" + program.str();
    }
    throw Error("bad class target");
  }

  static ClassTarget from_string(const std::string& s) {
    const auto split = [&](size_t from) {
      const auto colon = s.find(':', from);
      if (colon == std::string::npos) throw ParseError("bad class reference '" + s + "'");
      return colon;
    };
    if (s.rfind("all:", 0) == 0) return all(base_from_name(s.substr(4)));
    if (s.rfind("explicit:", 0) == 0) {
      const size_t c2 = split(9);
      const Base b = base_from_name(s.substr(9, c2 - 9));
      std::vector<Nat> members;
      std::string rest = s.substr(c2 + 1);
      std::istringstream in(rest);
      std::string item;
      while (std::getline(in, item, ','))
        if (!item.empty()) members.push_back(std::stoull(item));
      return explicit_members(b, std::move(members));
    }
    if (s.rfind("fin-family:", 0) == 0) return fin_family_of(BigNat(s.substr(11)));
    if (s.rfind("rec-family:", 0) == 0) return rec_family_of(BigNat(s.substr(11)));
    throw ParseError("bad class reference '" + s + "'");
  }
};

struct Term {
  bool is_var = false;
  BigNat value;      // constant
  std::string name;  // variable

  static Term var(std::string n) { return Term{true, 0, std::move(n)}; }
  static Term constant(BigNat v) { return Term{false, std::move(v), {}}; }
  static Term constant(Nat v) { return Term{false, BigNat(v), {}}; }

  std::string to_string() const { return is_var ? name : value.str(); }
};

enum class AtomKind {
  Disagrees,        // (disagrees CLS h x y)         h_h(x) != y over the class base
  StageCardAtLeast, // (stage-card-ge j n s)         n <= |W_{j,s}|
  HaltsWithin,      // (halts-within i x s)          run_bounded(i, x, s) halted
  InCeStage,        // (in-ce-stage x j s)           x in W_{j,s}
  InBStage,         // (in-b-stage CLS u s)          u codes a sample fit by a stage-s member
  Eq,               // (eq a b)
  PopcountIs,       // (popcount-is u d)
  LabelingEscapes,  // (labeling-escapes BASE h u v) some bit x of u has h_h(x) != bit x of v
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { ForAll, Exists, And, Or, Not, Atom };

  Kind kind = Kind::Atom;

  // quantifiers
  std::string var;
  std::optional<Term> bound;  // inclusive upper bound; unbounded if absent
  FormulaPtr body;

  // connectives (Not uses lhs only)
  FormulaPtr lhs, rhs;

  // atoms
  AtomKind atom = AtomKind::Eq;
  std::optional<ClassTarget> cls;
  std::optional<Base> atom_base;  // LabelingEscapes
  std::vector<Term> args;
};

inline FormulaPtr forall(std::string var, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::ForAll;
  f->var = std::move(var);
  f->body = std::move(body);
  return f;
}

inline FormulaPtr forall_le(std::string var, Term bound, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::ForAll;
  f->var = std::move(var);
  f->bound = std::move(bound);
  f->body = std::move(body);
  return f;
}

inline FormulaPtr exists(std::string var, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Exists;
  f->var = std::move(var);
  f->body = std::move(body);
  return f;
}

inline FormulaPtr exists_le(std::string var, Term bound, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Exists;
  f->var = std::move(var);
  f->bound = std::move(bound);
  f->body = std::move(body);
  return f;
}

inline FormulaPtr land(FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::And;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

inline FormulaPtr lor(FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Or;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

inline FormulaPtr lnot(FormulaPtr a) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Not;
  f->lhs = std::move(a);
  return f;
}

inline FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return lor(lnot(std::move(a)), std::move(b)); }

inline FormulaPtr make_atom(AtomKind kind, std::vector<Term> args,
                            std::optional<ClassTarget> cls = std::nullopt,
                            std::optional<Base> atom_base = std::nullopt) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Atom;
  f->atom = kind;
  f->args = std::move(args);
  f->cls = std::move(cls);
  f->atom_base = atom_base;
  return f;
}

// (eq 0 0), the canonical true matrix for vacuous conjunctions.
inline FormulaPtr truth() { return make_atom(AtomKind::Eq, {Term::constant(Nat{0}), Term::constant(Nat{0})}); }

inline FormulaPtr conjunction(const std::vector<FormulaPtr>& parts) {
  if (parts.empty()) return truth();
  FormulaPtr acc = parts.front();
  for (size_t i = 1; i < parts.size(); ++i) acc = land(acc, parts[i]);
  return acc;
}

inline FormulaPtr disjunction(const std::vector<FormulaPtr>& parts) {
  if (parts.empty()) return lnot(truth());
  FormulaPtr acc = parts.front();
  for (size_t i = 1; i < parts.size(); ++i) acc = lor(acc, parts[i]);
  return acc;
}

namespace arith_detail {

inline Base disagreement_base(const ClassTarget& t) {
  switch (t.kind) {
    case ClassTarget::Kind::FinFamily: return Base::Fin;
    case ClassTarget::Kind::RecFamily: return Base::ThdOmega;
    default: return t.base;
  }
}

// Membership guard for the hypothesis index variable of a family target:
// fin families via stage cardinalities, threshold families via stage sets.
inline FormulaPtr member_guard(const ClassTarget& target, const std::string& hvar,
                               const std::string& svar) {
  switch (target.kind) {
    case ClassTarget::Kind::FinFamily:
      return exists(svar, make_atom(AtomKind::StageCardAtLeast,
                                    {Term::constant(target.program), Term::var(hvar),
                                     Term::var(svar)}));
    case ClassTarget::Kind::RecFamily:
      return exists(svar, make_atom(AtomKind::InCeStage,
                                    {Term::var(hvar), Term::constant(target.program),
                                     Term::var(svar)}));
    default: throw Error("member guard only applies to family targets");
  }
}

}  // namespace arith_detail

/*
 * The bounded-VC statement: VCdim(H) < d rendered as
 *
 *   (forall distinct x_1 ... x_d)(exists y_1 ... y_d <= 1)
 *       (forall h in H)(exists k <= d)[ h(x_k) != y_k ]
 *
 * with d concrete, so the x-block is d separate quantifiers, the label
 * block is bounded, the position disjunction is a finite matrix, and the
 * class quantifier runs over hypothesis indices (guarded by stage atoms for
 * family targets, expanded for explicit classes). Equivalent to a Pi_1
 * statement: the only unbounded quantifiers are universal once the
 * existential membership guards are absorbed by negation.
 */
inline FormulaPtr build_vc_lt(const ClassTarget& target, Nat d) {
  if (d == 0) throw Error("build_vc_lt needs d >= 1");
  std::vector<std::string> xs, ys;
  for (Nat i = 1; i <= d; ++i) {
    xs.push_back("x" + std::to_string(i));
    ys.push_back("y" + std::to_string(i));
  }
  const Base dbase = arith_detail::disagreement_base(target);
  const auto escapes = [&](Term h, Base b) {
    std::vector<FormulaPtr> parts;
    for (Nat k = 0; k < d; ++k)
      parts.push_back(make_atom(AtomKind::Disagrees,
                                {h, Term::var(xs[k]), Term::var(ys[k])},
                                ClassTarget::all(b)));
    return disjunction(parts);
  };

  FormulaPtr class_quant;
  switch (target.kind) {
    case ClassTarget::Kind::Explicit: {
      std::vector<FormulaPtr> parts;
      for (Nat h : target.members) parts.push_back(escapes(Term::constant(h), dbase));
      class_quant = conjunction(parts);
      break;
    }
    case ClassTarget::Kind::AllBase:
      class_quant = forall("h", escapes(Term::var("h"), dbase));
      break;
    case ClassTarget::Kind::FinFamily:
      class_quant = forall("h", implies(arith_detail::member_guard(target, "h", "s"),
                                        escapes(Term::var("h"), Base::Fin)));
      break;
    case ClassTarget::Kind::RecFamily:
      class_quant =
          land(escapes(Term::constant(Nat{0}), Base::ThdOmega),  // h_omega
               forall("h", implies(arith_detail::member_guard(target, "h", "s"),
                                   escapes(Term::var("h"), Base::Thd))));
      break;
  }

  std::vector<FormulaPtr> distinct;
  for (Nat i = 0; i < d; ++i)
    for (Nat j = i + 1; j < d; ++j)
      distinct.push_back(lnot(make_atom(AtomKind::Eq, {Term::var(xs[i]), Term::var(xs[j])})));

  FormulaPtr body = class_quant;
  for (Nat i = d; i-- > 0;) body = exists_le(ys[i], Term::constant(Nat{1}), body);
  body = implies(conjunction(distinct), body);
  for (Nat i = d; i-- > 0;) body = forall(xs[i], body);
  return body;
}

/*
 * PAC learnability of the target: (exists d)[ VCdim(H) < d ], a Sigma_2
 * statement. With d a variable the point tuple is coded as a bit mask u of
 * popcount d, and a labeling of its points as a mask v <= u read at the
 * same positions.
 */
inline FormulaPtr build_pac(const ClassTarget& target) {
  const Base dbase = arith_detail::disagreement_base(target);
  const auto escapes = [&](Term h, Base b) {
    return make_atom(AtomKind::LabelingEscapes, {h, Term::var("u"), Term::var("v")}, std::nullopt,
                     b);
  };
  FormulaPtr class_quant;
  switch (target.kind) {
    case ClassTarget::Kind::Explicit: {
      std::vector<FormulaPtr> parts;
      for (Nat h : target.members) parts.push_back(escapes(Term::constant(h), dbase));
      class_quant = conjunction(parts);
      break;
    }
    case ClassTarget::Kind::AllBase:
      class_quant = forall("h", escapes(Term::var("h"), dbase));
      break;
    case ClassTarget::Kind::FinFamily:
      class_quant = forall("h", implies(arith_detail::member_guard(target, "h", "s"),
                                        escapes(Term::var("h"), Base::Fin)));
      break;
    case ClassTarget::Kind::RecFamily:
      class_quant = land(escapes(Term::constant(Nat{0}), Base::ThdOmega),
                         forall("h", implies(arith_detail::member_guard(target, "h", "s"),
                                             escapes(Term::var("h"), Base::Thd))));
      break;
  }
  FormulaPtr shatter_free =
      forall("u", implies(make_atom(AtomKind::PopcountIs, {Term::var("u"), Term::var("d")}),
                          exists_le("v", Term::var("u"), class_quant)));
  return exists("d", shatter_free);
}

/*
 * Strong (computable) PAC learnability: the conjunction of the Sigma_2 VC
 * statement with the computability of the consistency set B_H,
 *
 *   (exists e)[ (forall s)[ B_{H,s} and W_{e,s} are disjoint ]
 *               and (forall x)(exists s)[ x in B_{H,s} or x in W_{e,s} ] ]
 *
 * which prenexes to Sigma_3, as does the whole conjunction.
 */
inline FormulaPtr build_scpac(const ClassTarget& target) {
  FormulaPtr disjoint = forall(
      "s", forall_le("u", Term::var("s"),
                     lnot(land(make_atom(AtomKind::InBStage,
                                         {Term::var("u"), Term::var("s")}, target),
                               make_atom(AtomKind::InCeStage,
                                         {Term::var("u"), Term::var("e"), Term::var("s")})))));
  FormulaPtr covering = forall(
      "x", exists("t", lor(make_atom(AtomKind::InBStage, {Term::var("x"), Term::var("t")}, target),
                           make_atom(AtomKind::InCeStage,
                                     {Term::var("x"), Term::var("e"), Term::var("t")}))));
  return land(build_pac(target), exists("e", land(disjoint, covering)));
}

// --- classification -----------------------------------------------------

struct Classification {
  enum class Type { Delta0, Sigma, Pi };
  Type type = Type::Delta0;
  Nat level = 0;

  std::string to_string() const {
    switch (type) {
      case Type::Delta0: return "Delta_0";
      case Type::Sigma: return "Sigma_" + std::to_string(level);
      case Type::Pi: return "Pi_" + std::to_string(level);
    }
    throw Error("bad classification");
  }

  bool operator==(const Classification&) const = default;
};

namespace arith_detail {

// Minimal alternating quantifier-block string containing both arguments as
// subsequences; 'E' is preferred on ties, so ambiguous conjunctions report
// as Sigma.
inline std::string merge_prefixes(const std::string& p, const std::string& q) {
  std::map<std::tuple<size_t, size_t, char>, std::pair<Nat, char>> memo;
  const std::function<std::pair<Nat, char>(size_t, size_t, char)> best =
      [&](size_t i, size_t j, char last) -> std::pair<Nat, char> {
    if (i == p.size() && j == q.size()) return {0, 0};
    const auto key = std::make_tuple(i, j, last);
    if (const auto it = memo.find(key); it != memo.end()) return it->second;
    std::pair<Nat, char> out{UINT64_MAX, 0};
    for (char c : {'E', 'A'}) {
      if (c == last) continue;
      const size_t ni = i + (i < p.size() && p[i] == c);
      const size_t nj = j + (j < q.size() && q[j] == c);
      if (ni == i && nj == j) continue;
      const auto sub = best(ni, nj, c);
      if (sub.first + 1 < out.first) out = {sub.first + 1, c};
    }
    memo[key] = out;
    return out;
  };
  std::string result;
  size_t i = 0, j = 0;
  char last = 0;
  while (i < p.size() || j < q.size()) {
    const char c = best(i, j, last).second;
    result += c;
    i += (i < p.size() && p[i] == c);
    j += (j < q.size() && q[j] == c);
    last = c;
  }
  return result;
}

inline std::string dual_prefix(std::string s) {
  for (char& c : s) c = (c == 'A') ? 'E' : 'A';
  return s;
}

// Alternating block string of the unbounded quantifier prefix after prenex
// normalization; bounded quantifiers count as matrix.
inline std::string prefix_of(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom: return "";
    case Formula::Kind::Not: return dual_prefix(prefix_of(*f.lhs));
    case Formula::Kind::And:
    case Formula::Kind::Or: return merge_prefixes(prefix_of(*f.lhs), prefix_of(*f.rhs));
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      std::string body = prefix_of(*f.body);
      if (f.bound) return body;
      const char c = f.kind == Formula::Kind::ForAll ? 'A' : 'E';
      if (!body.empty() && body.front() == c) return body;
      return c + body;
    }
  }
  throw Error("bad formula node");
}

}  // namespace arith_detail

inline Classification classify(const FormulaPtr& f) {
  const std::string prefix = arith_detail::prefix_of(*f);
  if (prefix.empty()) return Classification{Classification::Type::Delta0, 0};
  return Classification{prefix.front() == 'E' ? Classification::Type::Sigma
                                              : Classification::Type::Pi,
                        prefix.size()};
}

// --- bounded evaluation --------------------------------------------------

/*
 * Truth value of the relativization of the formula with every unbounded
 * quantifier capped to range over [0, bound). This is finite model checking
 * of the emitted statement, not its truth value; callers interpret through
 * monotonicity where that applies.
 */
class BoundedEvaluator {
 public:
  explicit BoundedEvaluator(Nat bound) : bound_(bound) {}

  bool eval(const FormulaPtr& f) {
    std::map<std::string, Nat> env;
    return eval_node(*f, env);
  }

 private:
  Nat bound_;
  std::map<std::pair<std::string, Nat>, std::vector<Nat>> stage_cache_;
  std::map<std::pair<int, Nat>, Hypothesis> hypothesis_cache_;
  std::map<std::tuple<std::string, Nat, Nat>, bool> b_stage_cache_;

  BigNat term_value(const Term& t, const std::map<std::string, Nat>& env) const {
    if (!t.is_var) return t.value;
    const auto it = env.find(t.name);
    if (it == env.end()) throw Error("unbound variable '" + t.name + "'");
    return BigNat(it->second);
  }

  Nat nat_arg(const Term& t, const std::map<std::string, Nat>& env) const {
    return to_nat_checked(term_value(t, env), "formula argument");
  }

  const std::vector<Nat>& stage_set(const BigNat& j, Nat s) {
    const auto key = std::make_pair(j.str(), s);
    auto it = stage_cache_.find(key);
    if (it == stage_cache_.end())
      it = stage_cache_.emplace(key, ce_stage(ProgramIndex(j), StepBudget{s})).first;
    return it->second;
  }

  const Hypothesis& hypothesis(Base base, Nat index) {
    const auto key = std::make_pair(static_cast<int>(base), index);
    auto it = hypothesis_cache_.find(key);
    if (it == hypothesis_cache_.end())
      it = hypothesis_cache_.emplace(key, decode_hypothesis(base, index)).first;
    return it->second;
  }

  // Stage-s members of a class target, as a class spec.
  ClassSpec stage_class(const ClassTarget& t, Nat s) const {
    switch (t.kind) {
      case ClassTarget::Kind::AllBase: return all_of(t.base);
      case ClassTarget::Kind::Explicit: return explicit_class(t.base, t.members);
      case ClassTarget::Kind::FinFamily: return fin_family(ProgramIndex(t.program), StepBudget{s});
      case ClassTarget::Kind::RecFamily: return rec_family(ProgramIndex(t.program), StepBudget{s});
    }
    throw Error("bad class target");
  }

  // u codes a nonempty sample (list code of 2x+y entries) with u < s that
  // some stage-s member of the target fits exactly.
  bool in_b_stage(const ClassTarget& t, Nat u, Nat s) {
    if (u >= s) return false;
    const auto key = std::make_tuple(t.to_string(), u, s);
    if (const auto it = b_stage_cache_.find(key); it != b_stage_cache_.end()) return it->second;
    bool result = false;
    const std::vector<BigNat> entries = decode_list(BigNat(u));
    if (!entries.empty()) {
      Sample sample;
      bool ok = true;
      for (const BigNat& e : entries) {
        if (e > BigNat(UINT64_MAX)) {
          ok = false;
          break;
        }
        const Nat code = static_cast<Nat>(e);
        sample.pairs.push_back({code / 2, static_cast<std::uint8_t>(code % 2)});
      }
      if (ok) result = consistent(stage_class(t, s), sample, s) == Consistency::Yes;
    }
    b_stage_cache_[key] = result;
    return result;
  }

  bool eval_atom(const Formula& f, const std::map<std::string, Nat>& env) {
    switch (f.atom) {
      case AtomKind::Disagrees: {
        const Base b = arith_detail::disagreement_base(*f.cls);
        const Nat h = nat_arg(f.args[0], env);
        const Nat x = nat_arg(f.args[1], env);
        const Nat y = nat_arg(f.args[2], env);
        return evaluate(hypothesis(b, h), x) != (y != 0);
      }
      case AtomKind::StageCardAtLeast: {
        const BigNat j = term_value(f.args[0], env);
        const Nat n = nat_arg(f.args[1], env);
        const Nat s = nat_arg(f.args[2], env);
        return n <= stage_set(j, s).size();
      }
      case AtomKind::HaltsWithin: {
        const BigNat i = term_value(f.args[0], env);
        return run_bounded(ProgramIndex(i), nat_arg(f.args[1], env),
                           StepBudget{nat_arg(f.args[2], env)})
            .halted;
      }
      case AtomKind::InCeStage: {
        const Nat x = nat_arg(f.args[0], env);
        const BigNat j = term_value(f.args[1], env);
        const Nat s = nat_arg(f.args[2], env);
        const auto& w = stage_set(j, s);
        return std::binary_search(w.begin(), w.end(), x);
      }
      case AtomKind::InBStage:
        return in_b_stage(*f.cls, nat_arg(f.args[0], env), nat_arg(f.args[1], env));
      case AtomKind::Eq:
        return term_value(f.args[0], env) == term_value(f.args[1], env);
      case AtomKind::PopcountIs: {
        const Nat u = nat_arg(f.args[0], env);
        return static_cast<Nat>(std::popcount(u)) == nat_arg(f.args[1], env);
      }
      case AtomKind::LabelingEscapes: {
        const Nat h = nat_arg(f.args[0], env);
        const Nat u = nat_arg(f.args[1], env);
        const Nat v = nat_arg(f.args[2], env);
        const Hypothesis& hyp = hypothesis(*f.atom_base, h);
        for (Nat x = 0; x < 64; ++x)
          if ((u >> x) & 1)
            if (evaluate(hyp, x) != static_cast<bool>((v >> x) & 1)) return true;
        return false;
      }
    }
    throw Error("bad atom");
  }

  bool eval_node(const Formula& f, std::map<std::string, Nat>& env) {
    switch (f.kind) {
      case Formula::Kind::Atom: return eval_atom(f, env);
      case Formula::Kind::Not: return !eval_node(*f.lhs, env);
      case Formula::Kind::And: return eval_node(*f.lhs, env) && eval_node(*f.rhs, env);
      case Formula::Kind::Or: return eval_node(*f.lhs, env) || eval_node(*f.rhs, env);
      case Formula::Kind::ForAll:
      case Formula::Kind::Exists: {
        // bounded: var in [0, bound term]; unbounded: var in [0, global bound)
        Nat limit;
        if (f.bound) {
          limit = to_nat_checked(term_value(*f.bound, env) + 1, "quantifier bound");
        } else {
          limit = bound_;
        }
        const bool is_forall = f.kind == Formula::Kind::ForAll;
        const auto saved = env.find(f.var) != env.end()
                               ? std::optional<Nat>(env[f.var])
                               : std::nullopt;
        bool result = is_forall;
        for (Nat v = 0; v < limit; ++v) {
          env[f.var] = v;
          const bool sub = eval_node(*f.body, env);
          if (is_forall && !sub) {
            result = false;
            break;
          }
          if (!is_forall && sub) {
            result = true;
            break;
          }
        }
        if (saved)
          env[f.var] = *saved;
        else
          env.erase(f.var);
        return result;
      }
    }
    throw Error("bad formula node");
  }
};

inline bool eval_bounded(const FormulaPtr& f, Nat bound) {
  return BoundedEvaluator(bound).eval(f);
}

// --- canonical text form -------------------------------------------------

namespace arith_detail {

inline const char* atom_name(AtomKind k) {
  switch (k) {
    case AtomKind::Disagrees: return "disagrees";
    case AtomKind::StageCardAtLeast: return "stage-card-ge";
    case AtomKind::HaltsWithin: return "halts-within";
    case AtomKind::InCeStage: return "in-ce-stage";
    case AtomKind::InBStage: return "in-b-stage";
    case AtomKind::Eq: return "eq";
    case AtomKind::PopcountIs: return "popcount-is";
    case AtomKind::LabelingEscapes: return "labeling-escapes";
  }
  throw Error("bad atom");
}

inline void print_node(const Formula& f, std::ostream& out, Nat indent) {
  const auto pad = [&](Nat n) {
    for (Nat i = 0; i < n; ++i) out << ' ';
  };
  pad(indent);
  switch (f.kind) {
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      out << '(' << (f.kind == Formula::Kind::ForAll ? "forall" : "exists");
      if (f.bound) out << "-le";
      out << ' ' << f.var;
      if (f.bound) out << ' ' << f.bound->to_string();
      out << '\n';
      print_node(*f.body, out, indent + 2);
      out << ')';
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      out << '(' << (f.kind == Formula::Kind::And ? "and" : "or") << '\n';
      print_node(*f.lhs, out, indent + 2);
      out << '\n';
      print_node(*f.rhs, out, indent + 2);
      out << ')';
      return;
    case Formula::Kind::Not:
      out << "(not\n";
      print_node(*f.lhs, out, indent + 2);
      out << ')';
      return;
    case Formula::Kind::Atom:
      out << '(' << atom_name(f.atom);
      if (f.cls) out << ' ' << f.cls->to_string();
      if (f.atom_base) out << ' ' << base_name(*f.atom_base);
      for (const Term& t : f.args) out << ' ' << t.to_string();
      out << ')';
      return;
  }
}

struct SexprParser {
  std::string text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  std::string token() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of formula");
    if (text[pos] == '(' || text[pos] == ')') return std::string(1, text[pos++]);
    const size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')')
      ++pos;
    return text.substr(start, pos - start);
  }

  std::string peek() {
    const size_t save = pos;
    const std::string t = token();
    pos = save;
    return t;
  }

  void expect(const std::string& t) {
    const std::string got = token();
    if (got != t) throw ParseError("expected '" + t + "', got '" + got + "'");
  }

  Term term() {
    const std::string t = token();
    if (t.empty()) throw ParseError("empty term");
    if (std::isdigit(static_cast<unsigned char>(t[0]))) return Term::constant(BigNat(t));
    return Term::var(t);
  }

  FormulaPtr formula() {
    expect("(");
    const std::string head = token();
    if (head == "forall" || head == "exists") {
      const std::string var = token();
      FormulaPtr body = formula();
      expect(")");
      return head == "forall" ? forall(var, body) : exists(var, body);
    }
    if (head == "forall-le" || head == "exists-le") {
      const std::string var = token();
      const Term bound = term();
      FormulaPtr body = formula();
      expect(")");
      return head == "forall-le" ? forall_le(var, bound, body) : exists_le(var, bound, body);
    }
    if (head == "and" || head == "or") {
      FormulaPtr a = formula();
      FormulaPtr b = formula();
      expect(")");
      return head == "and" ? land(a, b) : lor(a, b);
    }
    if (head == "not") {
      FormulaPtr a = formula();
      expect(")");
      return lnot(a);
    }
    // atoms
    const auto finish_terms = [&](size_t count) {
      std::vector<Term> args;
      for (size_t i = 0; i < count; ++i) args.push_back(term());
      expect(")");
      return args;
    };
    if (head == "disagrees") {
      const ClassTarget cls = ClassTarget::from_string(token());
      return make_atom(AtomKind::Disagrees, finish_terms(3), cls);
    }
    if (head == "stage-card-ge") return make_atom(AtomKind::StageCardAtLeast, finish_terms(3));
    if (head == "halts-within") return make_atom(AtomKind::HaltsWithin, finish_terms(3));
    if (head == "in-ce-stage") return make_atom(AtomKind::InCeStage, finish_terms(3));
    if (head == "in-b-stage") {
      const ClassTarget cls = ClassTarget::from_string(token());
      return make_atom(AtomKind::InBStage, finish_terms(2), cls);
    }
    if (head == "eq") return make_atom(AtomKind::Eq, finish_terms(2));
    if (head == "popcount-is") return make_atom(AtomKind::PopcountIs, finish_terms(2));
    if (head == "labeling-escapes") {
      const Base b = base_from_name(token());
      return make_atom(AtomKind::LabelingEscapes, finish_terms(3), std::nullopt, b);
    }
    throw ParseError("unknown formula head '" + head + "'");
  }
};

}  // namespace arith_detail

inline std::string formula_to_string(const FormulaPtr& f) {
  std::ostringstream out;
  arith_detail::print_node(*f, out, 0);
  out << '\n';
  return out.str();
}

inline FormulaPtr parse_formula(const std::string& text) {
  arith_detail::SexprParser p{text};
  FormulaPtr f = p.formula();
  p.skip_ws();
  if (p.pos != p.text.size()) throw ParseError("trailing text after formula");
  return f;
}

// Sample code used by the in-b-stage atom: the list code of 2x+y per pair.
inline BigNat sample_code(const Sample& s) {
  std::vector<BigNat> entries;
  for (const auto& [x, y] : s.pairs) entries.push_back(BigNat(x) * 2 + (y != 0 ? 1 : 0));
  return encode_list(entries);
}

}  // namespace cpac
