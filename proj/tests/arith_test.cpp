#include "cpac/arith.hpp"

#include <gtest/gtest.h>

using namespace cpac;

namespace {

Classification sigma(Nat n) { return Classification{Classification::Type::Sigma, n}; }
Classification pi(Nat n) { return Classification{Classification::Type::Pi, n}; }
Classification delta0() { return Classification{Classification::Type::Delta0, 0}; }

TEST(Classify, HandShapes) {
  const FormulaPtr bounded_only =
      forall_le("x", Term::constant(Nat{5}),
                exists_le("y", Term::var("x"), make_atom(AtomKind::Eq, {Term::var("x"), Term::var("y")})));
  EXPECT_EQ(classify(bounded_only), delta0());

  const FormulaPtr sigma2 =
      exists("a", forall("b", make_atom(AtomKind::Eq, {Term::var("a"), Term::var("b")})));
  EXPECT_EQ(classify(sigma2), sigma(2));

  // the displayed chain shape: exists (forall ... and forall exists ...)
  const FormulaPtr chain = exists(
      "d", land(forall("s", make_atom(AtomKind::Eq, {Term::var("s"), Term::var("d")})),
                forall("x", exists("t", make_atom(AtomKind::Eq, {Term::var("x"), Term::var("t")})))));
  EXPECT_EQ(classify(chain), sigma(3));
}

TEST(Classify, NegationFlips) {
  const FormulaPtr f =
      exists("a", forall("b", make_atom(AtomKind::Eq, {Term::var("a"), Term::var("b")})));
  EXPECT_EQ(classify(lnot(f)), pi(2));
}

TEST(Classify, InvariantUnderRenamingAndBoundedPadding) {
  const auto shape = [](const std::string& v1, const std::string& v2, bool pad) {
    FormulaPtr matrix = make_atom(AtomKind::Eq, {Term::var(v1), Term::var(v2)});
    if (pad) matrix = forall_le("pad", Term::constant(Nat{7}), matrix);
    return exists(v1, forall(v2, matrix));
  };
  EXPECT_EQ(classify(shape("a", "b", false)), classify(shape("left", "right", false)));
  EXPECT_EQ(classify(shape("a", "b", false)), classify(shape("a", "b", true)));
}

TEST(Classify, MergeAbsorbsLikeBlocks) {
  // forall-forall across a conjunction stays Pi_1
  const FormulaPtr f =
      land(forall("a", make_atom(AtomKind::Eq, {Term::var("a"), Term::constant(Nat{0})})),
           forall("b", make_atom(AtomKind::Eq, {Term::var("b"), Term::constant(Nat{0})})));
  EXPECT_EQ(classify(f), pi(1));
}

TEST(Builders, VcLtIsPiOne) {
  EXPECT_EQ(classify(build_vc_lt(ClassTarget::explicit_members(Base::Thd, {0, 1, 2}), 2)), pi(1));
  EXPECT_EQ(classify(build_vc_lt(ClassTarget::all(Base::Ivl), 3)), pi(1));
  EXPECT_EQ(classify(build_vc_lt(ClassTarget::fin_family_of(BigNat(109)), 2)), pi(1));
  EXPECT_EQ(classify(build_vc_lt(ClassTarget::rec_family_of(BigNat(14)), 2)), pi(1));
}

TEST(Builders, PacIsSigmaTwo) {
  for (const ClassTarget& t :
       {ClassTarget::all(Base::Thd), ClassTarget::explicit_members(Base::Fin, {0, 1}),
        ClassTarget::fin_family_of(BigNat(109)), ClassTarget::rec_family_of(BigNat(14))})
    EXPECT_EQ(classify(build_pac(t)), sigma(2)) << t.to_string();
}

TEST(Builders, ScpacIsSigmaThree) {
  for (const ClassTarget& t :
       {ClassTarget::all(Base::Thd), ClassTarget::fin_family_of(BigNat(109)),
        ClassTarget::rec_family_of(BigNat(14))})
    EXPECT_EQ(classify(build_scpac(t)), sigma(3)) << t.to_string();
}

TEST(Builders, EmissionIsTotalOverFamilyIndices) {
  for (Nat j : {Nat{0}, Nat{1}, Nat{14}, Nat{109}, Nat{999999}}) {
    EXPECT_NO_THROW(build_pac(ClassTarget::fin_family_of(BigNat(j))));
    EXPECT_NO_THROW(build_scpac(ClassTarget::rec_family_of(BigNat(j))));
  }
}

TEST(EvalBounded, EmptyClassVcIsVacuouslyTrue) {
  const FormulaPtr f = build_vc_lt(ClassTarget::explicit_members(Base::Thd, {}), 1);
  for (Nat bound : {Nat{2}, Nat{5}, Nat{12}}) EXPECT_TRUE(eval_bounded(f, bound));
}

TEST(EvalBounded, IntervalExplicitExamples) {
  std::vector<Nat> members;
  for (Nat i = 0; i <= 10; ++i) members.push_back(i);
  const ClassTarget target = ClassTarget::explicit_members(Base::Ivl, members);
  EXPECT_TRUE(eval_bounded(build_vc_lt(target, 3), 12));
  EXPECT_FALSE(eval_bounded(build_vc_lt(target, 2), 12));
}

TEST(EvalBounded, ThresholdExplicitHasNoShatteredPair) {
  const ClassTarget target = ClassTarget::explicit_members(Base::Thd, {0, 1, 2, 3, 4, 5, 6});
  EXPECT_TRUE(eval_bounded(build_vc_lt(target, 2), 8));
  EXPECT_FALSE(eval_bounded(build_vc_lt(target, 1), 8));
}

TEST(EvalBounded, UnsatisfiableBoundedExistsIsFalse) {
  const FormulaPtr f =
      exists_le("x", Term::constant(Nat{0}),
                lnot(make_atom(AtomKind::Eq, {Term::var("x"), Term::var("x")})));
  EXPECT_FALSE(eval_bounded(f, 10));
}

TEST(EvalBounded, AgreesWithVcModuleOnExplicitClasses) {
  const std::vector<ClassSpec> classes{
      explicit_class(Base::Thd, {0, 1, 2, 3, 4, 5, 6}),
      explicit_class(Base::Ivl, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10}),
      explicit_class(Base::Fin, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15}),
      explicit_class(Base::Thd, {2}),
      explicit_class(Base::Fin, {3, 9, 21}),
  };
  for (const ClassSpec& spec : classes) {
    const ClassTarget target = ClassTarget::explicit_members(spec.base, spec.explicit_indices());
    const Nat vc = vc_exact(spec).value;
    for (Nat d = 1; d <= 4; ++d) {
      EXPECT_EQ(eval_bounded(build_vc_lt(target, d), 12), vc < d)
          << target.to_string() << " d=" << d;
    }
  }
}

TEST(EvalBounded, PacMatchesFiniteVcOnExplicitClass) {
  // bound 16 covers every point tuple over the breakpoints (<= 3) of the
  // class, so the bounded Sigma_2 statement must agree with the exact VC
  const ClassSpec spec = explicit_class(Base::Fin, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  const ClassTarget target = ClassTarget::explicit_members(spec.base, spec.explicit_indices());
  const Nat vc = vc_exact(spec).value;
  bool exists_d = false;
  for (Nat d = 1; d < 16; ++d) exists_d |= (vc < d);
  EXPECT_EQ(eval_bounded(build_pac(target), 16), exists_d);
}

TEST(EvalBounded, FamilyGuardsUseStageAtoms) {
  // fin-family of the empty program covers every small FIN index once the
  // stage bound allows it, so a pair is shattered and the d=2 statement
  // fails; the threshold family over the evens is a chain and passes it.
  EXPECT_FALSE(eval_bounded(build_vc_lt(ClassTarget::fin_family_of(BigNat(0)), 2), 16));
  EXPECT_TRUE(eval_bounded(build_vc_lt(ClassTarget::rec_family_of(BigNat(14)), 2), 48));
  EXPECT_FALSE(eval_bounded(build_vc_lt(ClassTarget::rec_family_of(BigNat(14)), 1), 48));
}

TEST(EvalBounded, InBStageAtomSemantics) {
  const ClassTarget thd012 = ClassTarget::explicit_members(Base::Thd, {0, 1, 2});
  Sample fit;
  fit.pairs = {{1, 1}};
  const BigNat code = sample_code(fit);
  EXPECT_EQ(code, 7);  // list code of [2*1+1]
  const auto atom_at = [&](Nat u, Nat s) {
    return make_atom(AtomKind::InBStage, {Term::constant(u), Term::constant(s)}, thd012);
  };
  EXPECT_TRUE(eval_bounded(atom_at(7, 8), 1));
  EXPECT_FALSE(eval_bounded(atom_at(7, 7), 1));  // codes live below the stage
  Sample broken;
  broken.pairs = {{1, 0}, {2, 1}};
  const Nat bad = to_nat_checked(sample_code(broken), "code");
  EXPECT_FALSE(eval_bounded(atom_at(bad, bad + 1), 1));
}

TEST(Text, RoundTripIsExact) {
  const std::vector<FormulaPtr> formulas{
      build_vc_lt(ClassTarget::explicit_members(Base::Thd, {0, 2}), 2),
      build_vc_lt(ClassTarget::all(Base::Ivl), 1),
      build_pac(ClassTarget::fin_family_of(BigNat(109))),
      build_scpac(ClassTarget::rec_family_of(BigNat(14))),
  };
  for (const FormulaPtr& f : formulas) {
    const std::string text = formula_to_string(f);
    EXPECT_EQ(formula_to_string(parse_formula(text)), text);
  }
}

TEST(Text, ParseErrors) {
  EXPECT_THROW(parse_formula("(frobnicate x)"), ParseError);
  EXPECT_THROW(parse_formula("(eq 1"), ParseError);
  EXPECT_THROW(parse_formula("(eq 1 2) trailing"), ParseError);
}

TEST(Text, ClassTargetRoundTrip) {
  for (const std::string s :
       {"all:thd", "all:init", "explicit:fin:1,2,5", "explicit:ivl:", "fin-family:109",
        "rec-family:14"})
    EXPECT_EQ(ClassTarget::from_string(s).to_string(), s);
}

}  // namespace
