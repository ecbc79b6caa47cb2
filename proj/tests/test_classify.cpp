#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace prodgeo;

namespace {
SampleGrid grid(std::size_t n) { return SampleGrid::default_grid(n); }
}  // namespace

TEST(Grid, DefaultIsDeterministicAndInsideTheBox) {
    const auto a = SampleGrid::default_grid(3), b = SampleGrid::default_grid(3);
    ASSERT_EQ(a.size(), 64u);
    EXPECT_EQ(a.points(), b.points());
    for (const auto& p : a.points())
        for (double x : p.coords()) {
            EXPECT_GE(x, 0.5);
            EXPECT_LE(x, 2.0);
        }
    EXPECT_NE(SampleGrid::default_grid(3, 1).points(), a.points());
}

TEST(Grid, LatticeOrderAndValidation) {
    const auto g = SampleGrid::lattice({1.0, 10.0}, {2.0, 20.0}, 3);
    ASSERT_EQ(g.size(), 9u);
    EXPECT_EQ(g.points()[1], EvalPoint({1.0, 15.0}));
    EXPECT_EQ(g.points()[8], EvalPoint({2.0, 20.0}));
    EXPECT_THROW(SampleGrid::lattice({1.0}, {0.5}, 3), invalid_argument_error);
    EXPECT_THROW(SampleGrid::lattice({0.0}, {1.0}, 3), invalid_argument_error);
    EXPECT_THROW(SampleGrid::log_uniform({1.0}, {2.0}, 1, 0), invalid_argument_error);
}

TEST(ConstantElasticity, CobbDouglas) {
    const auto v = detect_constant_elasticity(make_cobb_douglas(1.0, {0.3, 0.7}), grid(2), 1e-9);
    ASSERT_TRUE(v.all_constant());
    EXPECT_NEAR(v.factors[0].mean, 0.3, 1e-12);
    EXPECT_NEAR(v.factors[1].mean, 0.7, 1e-12);
    EXPECT_LE(v.factors[0].max_deviation, 1e-12);
}

TEST(ConstantElasticity, SingleFactorFamily) {
    const auto m = make_theorem_family(ConstantElasticityParams{1.0, 1.0, 0, 2.0, {InnerFn::linear(1.0, 0.0)}});
    const auto v = detect_constant_elasticity(m, grid(2), 1e-9);
    EXPECT_TRUE(v.factors[0].constant);
    EXPECT_NEAR(v.factors[0].mean, 2.0, 1e-12);
    EXPECT_FALSE(v.factors[1].constant);
}

TEST(ConstantElasticity, LinearSumHasNone) {
    const auto v = detect_constant_elasticity(make_opaque(2, [](auto x) { return x[0] + x[1]; }), grid(2), 1e-9);
    EXPECT_EQ(v.constant_count(), 0u);
}

TEST(Classify, ConstantReturnsIsEq9WithFittedAmplitude) {
    const auto v = classify(make_theorem_family(ConstantReturnsParams{2.0, 3}), grid(3));
    EXPECT_EQ(v.matched_family, Family::eq9);
    ASSERT_TRUE(v.fitted && v.fitted->A);
    EXPECT_NEAR(*v.fitted->A, 2.0, 1e-12);
    EXPECT_TRUE(v.proportional_mrs.holds.value());
    EXPECT_TRUE(v.vanishing_gk.holds.value());
}

TEST(Classify, SqrtProductIsEq10WithoutVanishingK) {
    const auto v = classify(make_theorem_family(SqrtProductParams{1.0, 4}), grid(4));
    EXPECT_EQ(v.matched_family, Family::eq10);
    EXPECT_FALSE(v.vanishing_gk.holds.value());
    EXPECT_TRUE(v.vanishing_sectional.holds.value());
    // det at (1,1,1,1) from the permutation expansion is nonzero
    const Jet2 j = jet_eval(make_theorem_family(SqrtProductParams{1.0, 4}), testing_support::ones(4));
    EXPECT_GT(std::abs(testing_support::leibniz_det(j.hessian())), 1e-3);
}

TEST(Classify, TwoInputsCoincideNote) {
    const auto v = classify(make_theorem_family(SqrtProductParams{1.0, 2}), grid(2));
    EXPECT_EQ(v.matched_family, Family::eq9);
    ASSERT_FALSE(v.notes.empty());
    EXPECT_NE(v.notes.front().find("coincide"), std::string::npos);
    EXPECT_TRUE(v.vanishing_sectional.holds.value());
    EXPECT_TRUE(v.vanishing_gk.holds.value());
}

TEST(Classify, UnequalCobbDouglasIsEq2) {
    const auto v = classify(make_cobb_douglas(1.0, {0.3, 0.7}), grid(2));
    EXPECT_EQ(v.matched_family, Family::eq2);
    EXPECT_FALSE(v.proportional_mrs.holds.value());
    ASSERT_TRUE(v.fitted);
    EXPECT_NEAR(v.fitted->exponents[0], 0.3, 1e-12);
}

TEST(Classify, HomotheticWithAffineOuterIsEq8) {
    const auto m = ProductionModel::homothetic(OuterFn::affine(3.0, 1.0), -0.5, 2);
    const auto v = classify(m, grid(2));
    EXPECT_EQ(v.matched_family, Family::eq8);
    ASSERT_TRUE(v.fitted && v.fitted->k);
    EXPECT_EQ(*v.fitted->k, -1.0);
}

TEST(Classify, HomotheticWithIdentityOuterIsAlsoCobbDouglas) {
    // F(u) = u makes prod x^k an equal-exponent Cobb-Douglas; the most
    // specific family wins
    const auto v = classify(ProductionModel::homothetic(OuterFn::identity(), 0.8, 3), grid(3));
    EXPECT_EQ(v.matched_family, Family::eq2);
    const auto v9 = classify(ProductionModel::homothetic(OuterFn::identity(), 1.0 / 3.0, 3), grid(3));
    EXPECT_EQ(v9.matched_family, Family::eq9);
}

TEST(Classify, SingleConstantElasticityIsEq7) {
    const auto m = make_theorem_family(ConstantElasticityParams{1.5, 0.5, 1, 2.0, {InnerFn::power(1.0, 0.5)}});
    const auto v = classify(m, grid(2));
    EXPECT_EQ(v.matched_family, Family::eq7);
    ASSERT_TRUE(v.fitted && v.fitted->index && v.fitted->k);
    EXPECT_EQ(*v.fitted->index, 1u);
    EXPECT_NEAR(*v.fitted->k, 2.0, 1e-12);
}

TEST(Classify, CounterexamplesMatchNothing) {
    for (const auto& c : testing_support::counterexample_library()) {
        const auto v = classify(c.model, grid(c.model.arity()));
        if (c.eq2_allowed) {
            EXPECT_TRUE(v.matched_family == Family::eq2 || v.matched_family == Family::none) << c.name;
        } else {
            EXPECT_EQ(v.matched_family, Family::none) << c.name;
        }
    }
}

TEST(Classify, NSquaredInvariantForTwoInputs) {
    for (const auto& c : testing_support::counterexample_library()) {
        if (c.model.arity() != 2) continue;
        const auto v = classify(c.model, grid(2));
        if (v.vanishing_sectional.holds.value_or(false)) {
            EXPECT_TRUE(v.vanishing_gk.holds.value_or(false)) << c.name;
        }
    }
}

TEST(Classify, ErroringPointsMakeFieldsUndetermined) {
    const auto m = make_opaque(2, [](auto x) {
        using std::sqrt;
        using prodgeo::sqrt;
        return sqrt(x[0] - 0.7) * x[1];
    });
    const auto v = classify(m, grid(2));
    EXPECT_FALSE(v.proportional_mrs.holds.has_value());
    EXPECT_FALSE(v.vanishing_gk.holds.has_value());
    EXPECT_FALSE(v.constant_elasticity.determined());
    EXPECT_EQ(v.matched_family, Family::none);
}

TEST(Classify, DimensionMismatch) {
    EXPECT_THROW(classify(make_cobb_douglas(1.0, {0.5, 0.5}), grid(3)), dimension_error);
}

TEST(VerifyTheorem, SpecExamples) {
    const auto iv1 = verify_theorem(TheoremPart::iv1, 3, 20, 0);
    EXPECT_EQ(iv1.passed_count(), 20u);
    EXPECT_LE(iv1.worst_measure(), 1e-10);
    EXPECT_TRUE(verify_theorem(TheoremPart::iii, 2, 20, 0).all_passed());
    for (std::size_t n : {2, 3, 4}) {
        const auto iv2 = verify_theorem(TheoremPart::iv2, n, 20, 0);
        EXPECT_TRUE(iv2.all_passed()) << n;
        EXPECT_GT(iv2.worst_measure(), 0.0);
    }
}

TEST(VerifyTheorem, DeterministicGivenSeed) {
    const auto a = verify_theorem(TheoremPart::i, 3, 10, 42);
    const auto b = verify_theorem(TheoremPart::i, 3, 10, 42);
    ASSERT_EQ(a.results.size(), b.results.size());
    for (std::size_t t = 0; t < a.results.size(); ++t) {
        EXPECT_EQ(a.results[t].model, b.results[t].model);
        EXPECT_EQ(a.results[t].measure, b.results[t].measure);
    }
    EXPECT_NE(verify_theorem(TheoremPart::i, 3, 10, 43).results[0].model, a.results[0].model);
}

TEST(VerifyTheorem, ArgumentChecks) {
    EXPECT_THROW(verify_theorem(TheoremPart::i, 1, 5, 0), invalid_argument_error);
    EXPECT_THROW(verify_theorem(TheoremPart::i, 2, 0, 0), invalid_argument_error);
}
