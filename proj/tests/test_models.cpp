#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace prodgeo;

TEST(Models, CobbDouglasValue) {
    const auto m = make_cobb_douglas(2.0, {0.3, 0.7});
    EXPECT_DOUBLE_EQ(eval(m, EvalPoint({1.5, 0.5})), 2.0 * std::pow(1.5, 0.3) * std::pow(0.5, 0.7));
}

TEST(Models, CobbDouglasValidation) {
    EXPECT_THROW(make_cobb_douglas(0.0, {0.5, 0.5}), invalid_argument_error);
    EXPECT_THROW(make_cobb_douglas(-1.0, {0.5, 0.5}), invalid_argument_error);
    EXPECT_THROW(make_cobb_douglas(1.0, {0.5}), invalid_argument_error);
    EXPECT_THROW(make_cobb_douglas(1.0, {0.5, 0.0}), invalid_argument_error);
    EXPECT_THROW(make_cobb_douglas(1.0, {0.5, NAN}), invalid_argument_error);
}

TEST(Models, InnerAndOuterValidation) {
    EXPECT_THROW(InnerFn::linear(0.0, 1.0), invalid_argument_error);
    EXPECT_THROW(InnerFn::log(0.0, 1.0), invalid_argument_error);
    EXPECT_THROW(InnerFn::power(1.0, 0.0), invalid_argument_error);
    EXPECT_THROW(OuterFn::exp_affine(0.0, 1.0, 0.0), invalid_argument_error);
    EXPECT_THROW(OuterFn::affine(0.0, 1.0), invalid_argument_error);
    EXPECT_THROW(ProductionModel::homothetic(OuterFn::identity(), 0.0, 2), invalid_argument_error);
}

TEST(Models, InnerDerivativesMatchFormulas) {
    const double x = 1.3;
    const auto lg = InnerFn::log(0.4, 0.2);
    EXPECT_DOUBLE_EQ(lg(x), 0.4 * std::log(x) + 0.2);
    EXPECT_DOUBLE_EQ(lg.derivative(x), 0.4 / x);
    EXPECT_DOUBLE_EQ(lg.second_derivative(x), -0.4 / (x * x));
    const auto pw = InnerFn::power(1.5, -0.5);
    EXPECT_DOUBLE_EQ(pw(x), 1.5 * std::pow(x, -0.5));
    EXPECT_DOUBLE_EQ(pw.derivative(x), 1.5 * -0.5 * std::pow(x, -1.5));
    EXPECT_EQ(pw.direction(), -1);
    const auto ln = InnerFn::linear(-2.0, 3.0);
    EXPECT_DOUBLE_EQ(ln(x), -2.0 * x + 3.0);
    EXPECT_EQ(ln.second_derivative(x), 0.0);
    EXPECT_EQ(ln.direction(), -1);
}

TEST(Models, QuasiSumEvaluation) {
    const auto m = ProductionModel::quasi_sum(OuterFn::exp_affine(2.0, 0.5, 1.0),
                                              {InnerFn::log(1.0, 0.0), InnerFn::linear(1.0, 0.0)});
    const EvalPoint p({1.2, 0.8});
    EXPECT_DOUBLE_EQ(eval(m, p), 2.0 * std::exp(0.5 * (std::log(1.2) + 0.8)) + 1.0);
}

TEST(Models, HomotheticEvaluation) {
    const auto m = ProductionModel::homothetic(OuterFn::affine(3.0, 1.0), -0.5, 3);
    const EvalPoint p({1.2, 0.8, 1.7});
    EXPECT_NEAR(eval(m, p), 3.0 * std::pow(1.2 * 0.8 * 1.7, -0.5) + 1.0, 1e-14);
}

TEST(Models, PointArityChecked) {
    const auto m = make_cobb_douglas(1.0, {0.5, 0.5});
    EXPECT_THROW(eval(m, EvalPoint({1.0, 1.0, 1.0})), dimension_error);
}

TEST(Models, ScaleOutputMultipliesValues) {
    const EvalPoint p({1.4, 0.6});
    const auto cd = make_cobb_douglas(1.5, {0.3, 0.7});
    EXPECT_DOUBLE_EQ(eval(scale_output(cd, 2.0), p), 2.0 * eval(cd, p));
    const auto qs = ProductionModel::quasi_sum(OuterFn::affine(1.0, 0.5), {InnerFn::log(1, 0), InnerFn::linear(1, 0)});
    EXPECT_DOUBLE_EQ(eval(scale_output(qs, 3.0), p), 3.0 * eval(qs, p));
    EXPECT_THROW(scale_output(cd, 0.0), invalid_argument_error);
}

TEST(Models, MonotoneDirections) {
    EXPECT_EQ(monotone_directions(make_cobb_douglas(1.0, {0.5, -0.5})), (std::vector<int>{1, -1}));
    const auto qs = ProductionModel::quasi_sum(OuterFn::identity(), {InnerFn::power(1, -1), InnerFn::linear(1, 0)});
    EXPECT_EQ(monotone_directions(qs), (std::vector<int>{-1, 1}));
    EXPECT_FALSE(monotone_directions(make_opaque(2, [](auto x) { return x[0] + x[1]; })).has_value());
}

TEST(Models, QuasiSumViewReproducesCobbDouglas) {
    const auto cd = make_cobb_douglas(1.7, {0.4, 1.1, 0.3});
    const auto view = quasi_sum_view(cd);
    ASSERT_TRUE(view.has_value());
    const EvalPoint p({0.6, 1.8, 1.1});
    double u = 0.0;
    for (std::size_t i = 0; i < 3; ++i) u += view->inners[i](p[i]);
    EXPECT_NEAR(view->outer.value(u), eval(cd, p), 1e-14);
}

TEST(Models, TheoremFamilies) {
    const auto eq9 = make_theorem_family(ConstantReturnsParams{2.0, 4});
    EXPECT_NEAR(eval(eq9, EvalPoint({16.0, 1.0, 1.0, 1.0})), 4.0, 1e-14);
    const auto eq10 = make_theorem_family(SqrtProductParams{1.0, 3});
    EXPECT_NEAR(eval(eq10, EvalPoint({4.0, 9.0, 1.0})), 6.0, 1e-14);
    // A x_2^k exp(D h_1(x_1)), zero-based index 1
    const auto eq7 = make_theorem_family(ConstantElasticityParams{1.5, 0.5, 1, 2.0, {InnerFn::linear(1.0, 0.0)}});
    EXPECT_NEAR(eval(eq7, EvalPoint({0.8, 1.3})), 1.5 * 1.3 * 1.3 * std::exp(0.5 * 0.8), 1e-14);
    EXPECT_THROW(make_theorem_family(CobbDouglasParams{1.0, {0.5, -0.2}}), invalid_argument_error);
    EXPECT_THROW(make_theorem_family(ConstantElasticityParams{1.0, -1.0, 0, 1.0, {InnerFn::linear(1, 0)}}),
                 invalid_argument_error);
    EXPECT_EQ(family_part(FamilyParams{SqrtProductParams{1.0, 3}}), TheoremPart::iv3);
}

TEST(Models, TheoremPartNames) {
    for (auto p : {TheoremPart::i, TheoremPart::ii, TheoremPart::iii, TheoremPart::iv1, TheoremPart::iv2,
                   TheoremPart::iv3})
        EXPECT_EQ(parse_theorem_part(to_string(p)), p);
    EXPECT_FALSE(parse_theorem_part("v").has_value());
    EXPECT_FALSE(parse_theorem_part("IV1").has_value());
}
