#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace spinlab;
using namespace spinlab::testing;

namespace {

/// Non-uniqueness window from the quadratic condition at the fixed point:
/// |f'(x)| > 1 at x = f(x) iff gamma x^2 + (1 + bg - d(1 - bg)) x + beta < 0,
/// mapped through lambda(x) = x ((beta + x)/(1 + gamma x))^d.
std::optional<std::pair<double, double>> closed_form_interval(double beta, double gamma, int delta)
{
    const int d = delta - 1;
    const double bg = beta * gamma;
    const double b = 1.0 + bg - d * (1.0 - bg);
    auto lam = [&](double x) { return x * std::pow((beta + x) / (1.0 + gamma * x), d); };
    if (gamma == 0.0) {
        if (b >= 0)
            return std::nullopt;
        return std::make_pair(lam(-beta / b), std::numeric_limits<double>::infinity());
    }
    const double disc = b * b - 4.0 * gamma * beta;
    if (disc <= 0 || b >= 0)
        return std::nullopt;
    const double x1 = (-b - std::sqrt(disc)) / (2 * gamma), x2 = (-b + std::sqrt(disc)) / (2 * gamma);
    return std::make_pair(lam(x1), lam(x2));
}

/// Plain iteration of f o f from a start value, no root polishing.
double iterate_twice(const TreeMap& f, double x, int steps)
{
    for (int i = 0; i < steps; ++i)
        x = f(f(x));
    return x;
}

} // namespace

TEST(TreeMap, SymmetricFixedPoint)
{
    for (int delta : { 3, 4, 7 }) {
        auto f = tree_map(make_params(0.4, 0.4, 1, delta));
        EXPECT_NEAR(f(1.0), 1.0, 1e-15);
        EXPECT_NEAR(tree_fixed_point(f), 1.0, 1e-14);
    }
}

TEST(TreeMap, DirectSubstitution)
{
    // beta weights 0-0 edges, gamma weights 1-1 edges: f(1) = ((1 + gamma)/(beta + 1))^2.
    auto f = tree_map(make_params(0.25, 0.5, 1, 3));
    EXPECT_NEAR(f(1.0), 1.44, 1e-14);
    EXPECT_NEAR(f.kernel(std::numeric_limits<double>::infinity()), 0.5, 0.0);
}

TEST(TreeMap, LinearInLambda)
{
    auto f = tree_map(make_params(0.3, 0.7, 1.5, 5));
    auto g = tree_map(make_params(0.3, 0.7, 3.0, 5));
    for (double x : { 0.01, 0.3, 1.0, 4.0, 100.0 })
        EXPECT_NEAR(g(x), 2.0 * f(x), 1e-13 * g(x));
}

TEST(TreeMap, DerivativeMatchesFiniteDifference)
{
    auto f = tree_map(make_params(0.3, 0.2, 1.7, 4));
    for (double x : { 0.1, 0.5, 2.0, 8.0 }) {
        double h = 1e-6 * x;
        EXPECT_NEAR(f.derivative(x), (f(x + h) - f(x - h)) / (2 * h), 1e-6 * std::abs(f.derivative(x)));
    }
}

TEST(TreeMap, SingularAtZeroWithoutBeta)
{
    auto f = tree_map(make_params(0, 0.5, 1, 3));
    try {
        f(0.0);
        FAIL();
    } catch (const SpinError& e) {
        EXPECT_EQ(e.code(), ErrorCode::DomainError);
    }
}

TEST(Classify, Examples)
{
    EXPECT_EQ(classify_uniqueness(make_params(0.2, 0.2, 1, 3)), Regime::NonUniqueness);
    auto f = tree_map(make_params(0.2, 0.2, 1, 3));
    EXPECT_NEAR(fixed_point_slope(f, 1.0), 2 * 0.96 / 1.44, 1e-15);
    EXPECT_NEAR(fixed_point_slope(f, 1.0), 4.0 / 3.0, 1e-15);
    EXPECT_EQ(classify_uniqueness(make_params(1, 0, 0.5, 3)), Regime::Uniqueness);
    EXPECT_EQ(classify_uniqueness(make_params(1, 0, 1, 6)), Regime::NonUniqueness);
}

TEST(Classify, RejectsFerromagnets)
{
    try {
        classify_uniqueness(make_params(2, 3, 1, 3));
        FAIL();
    } catch (const SpinError& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotAntiferromagnetic);
    }
}

TEST(Classify, CriticalBandAroundSlopeOne)
{
    EXPECT_EQ(classify_slope(1.0, 1e-6), Regime::Critical);
    EXPECT_EQ(classify_slope(1.0 + 2e-6, 1e-6), Regime::NonUniqueness);
    EXPECT_EQ(classify_slope(1.0 - 2e-6, 1e-6), Regime::Uniqueness);
}

TEST(HardCore, CriticalActivity)
{
    EXPECT_NEAR(hardcore_lambda_c(3), 4.0, 1e-12);
    EXPECT_NEAR(hardcore_lambda_c(4), 27.0 / 16.0, 1e-12);
    EXPECT_NEAR(hardcore_lambda_c(6), 3125.0 / 4096.0, 1e-12);
}

TEST(HardCore, RegimeFlipsAtCriticalActivity)
{
    for (int delta = 3; delta <= 8; ++delta) {
        double lc = hardcore_lambda_c(delta);
        EXPECT_EQ(classify_uniqueness(make_params(1, 0, lc * (1 - 1e-6), delta)), Regime::Uniqueness) << delta;
        EXPECT_EQ(classify_uniqueness(make_params(1, 0, lc * (1 + 1e-6), delta)), Regime::NonUniqueness) << delta;
    }
}

TEST(HardCore, IntervalStartsAtCriticalActivity)
{
    for (int delta = 3; delta <= 8; ++delta) {
        auto iv = lambda_interval(1, 0, delta);
        ASSERT_TRUE(iv);
        EXPECT_NEAR(iv->first, hardcore_lambda_c(delta), 1e-9 * hardcore_lambda_c(delta));
        EXPECT_TRUE(std::isinf(iv->second));
    }
}

TEST(SymmetricIsing, NonUniquenessBelowCriticalCoupling)
{
    for (int delta : { 3, 4, 6 }) {
        const double crit = double(delta - 2) / delta;
        for (int i = 0; i < 50; ++i) {
            double b = (i + 0.5) / 50.0;
            if (std::abs(b - crit) <= 1e-6)
                continue;
            Regime r = classify_uniqueness(make_params(b, b, 1, delta));
            EXPECT_EQ(r, b < crit ? Regime::NonUniqueness : Regime::Uniqueness) << "delta " << delta << " b " << b;
        }
    }
}

TEST(LambdaInterval, Examples)
{
    EXPECT_FALSE(lambda_interval(0.5, 0.5, 3));
    auto iv = lambda_interval(0.2, 0.2, 3);
    ASSERT_TRUE(iv);
    EXPECT_LT(iv->first, 1.0);
    EXPECT_GT(iv->second, 1.0);
    EXPECT_NEAR(iv->first * iv->second, 1.0, 1e-6);
}

TEST(LambdaInterval, MatchesClosedForm)
{
    std::mt19937_64 rng(99);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        int delta = uniform_int(rng, 3, 9);
        double beta = uniform(rng, 0, 1.5), gamma = uniform(rng, 0, 1.5);
        if (beta * gamma >= 1)
            continue;
        auto got = lambda_interval(beta, gamma, delta);
        auto want = closed_form_interval(beta, gamma, delta);
        ASSERT_EQ(got.has_value(), want.has_value()) << beta << " " << gamma << " " << delta;
        if (!got)
            continue;
        ++checked;
        EXPECT_NEAR(got->first, want->first, 1e-8 * want->first);
        if (std::isinf(want->second))
            EXPECT_TRUE(std::isinf(got->second));
        else
            EXPECT_NEAR(got->second, want->second, 1e-8 * want->second);
    }
    EXPECT_GT(checked, 20);
}

TEST(LambdaInterval, EndpointsForZeroWeights)
{
    auto a = lambda_interval(0.0, 0.5, 4);
    ASSERT_TRUE(a);
    EXPECT_EQ(a->first, 0.0);
    auto b = lambda_interval(1.0, 0.0, 4);
    ASSERT_TRUE(b);
    EXPECT_TRUE(std::isinf(b->second));
}

TEST(LambdaInterval, SymmetricModelIsReciprocal)
{
    for (int delta : { 3, 4, 5, 8 })
        for (double b : { 0.05, 0.1, 0.2, 0.3 }) {
            auto iv = lambda_interval(b, b, delta);
            if (!iv)
                continue;
            EXPECT_NEAR(iv->first * iv->second, 1.0, 1e-6);
        }
}

TEST(LambdaInterval, SwappingWeightsInvertsTheWindow)
{
    // Relabeling spins 0 <-> 1 exchanges beta and gamma and inverts lambda.
    auto a = lambda_interval(0.3, 0.6, 4);
    auto b = lambda_interval(0.6, 0.3, 4);
    ASSERT_TRUE(a && b);
    EXPECT_NEAR(a->first * b->second, 1.0, 1e-8);
    EXPECT_NEAR(a->second * b->first, 1.0, 1e-8);
}

TEST(LambdaInterval, PinnedValues)
{
    auto a = lambda_interval(0.2, 0.2, 3);
    EXPECT_NEAR(a->first, 0.0424492346, 1e-9);
    EXPECT_NEAR(a->second, 23.5575508, 1e-6);
    auto b = lambda_interval(0.3, 0.6, 4);
    EXPECT_NEAR(b->first, 0.03141170785, 1e-10);
    EXPECT_NEAR(b->second, 1.989703976, 1e-8);
}

TEST(ExtremalMarginals, UniquenessCollapses)
{
    for (auto p : { make_params(1, 0, 0.5, 3), make_params(0.5, 0.5, 2, 3), make_params(0.8, 0.6, 1.2, 5) }) {
        auto pt = extremal_marginals(p);
        ASSERT_EQ(pt.regime, Regime::Uniqueness);
        double q = pt.fixed_point / (1 + pt.fixed_point);
        EXPECT_NEAR(pt.q_minus, q, 1e-9);
        EXPECT_NEAR(pt.q_plus, q, 1e-9);
    }
}

TEST(ExtremalMarginals, SymmetricModelSumsToOne)
{
    for (int delta : { 3, 4, 6 })
        for (double b : { 0.05, 0.1, 0.2 }) {
            auto pt = extremal_marginals(make_params(b, b, 1, delta));
            ASSERT_EQ(pt.regime, Regime::NonUniqueness);
            EXPECT_LT(pt.q_minus, pt.q_plus);
            EXPECT_NEAR(pt.q_minus + pt.q_plus, 1.0, 1e-9);
            EXPECT_NEAR(pt.p_minus + pt.p_plus, 1.0, 1e-9);
        }
}

TEST(ExtremalMarginals, HardCoreSixRegular)
{
    const auto p = make_params(1, 0, 1, 6);
    auto pt = extremal_marginals(p);
    auto f = tree_map(p);
    ASSERT_EQ(pt.regime, Regime::NonUniqueness);
    EXPECT_LT(pt.q_minus, pt.q_plus);
    EXPECT_LE(std::abs(f(pt.r_plus) - pt.r_minus), 1e-10 * pt.r_minus);
    EXPECT_LE(std::abs(f(pt.r_minus) - pt.r_plus), 1e-10 * pt.r_plus);

    // Oracle: long plain iteration from both extremes.
    double hi = iterate_twice(f, 1e6, 20000);
    double lo = iterate_twice(f, 1e-6, 20000);
    EXPECT_NEAR(pt.r_plus, hi, 1e-9 * hi);
    EXPECT_NEAR(pt.r_minus, lo, 1e-9 * lo);
    EXPECT_NEAR(pt.q_minus, 0.05994717, 1e-8);
    EXPECT_NEAR(pt.q_plus, 0.42333540, 1e-8);
    EXPECT_NEAR(pt.p_minus, 0.03546955, 1e-8);
    EXPECT_NEAR(pt.p_plus, 0.40831988, 1e-8);
}

TEST(ExtremalMarginals, RegularTreeMarginalsUseDeltaChildren)
{
    const auto p = make_params(0.3, 0.6, 0.2, 4);
    auto pt = extremal_marginals(p);
    ASSERT_EQ(pt.regime, Regime::NonUniqueness);
    auto k = [&](double r) { return (1 + p.gamma * r) / (p.beta + r); };
    double rp = p.lambda * std::pow(k(pt.r_minus), 4);
    EXPECT_NEAR(pt.p_plus, rp / (1 + rp), 1e-12);
}

TEST(ExtremalMarginals, SpinRelabelingSymmetry)
{
    // (beta, gamma, lambda) and (gamma, beta, 1/lambda) describe the same model with spins renamed.
    std::mt19937_64 rng(17);
    int nonunique = 0;
    for (int trial = 0; trial < 40; ++trial) {
        int delta = uniform_int(rng, 3, 7);
        double beta = uniform(rng, 0.01, 0.6), gamma = uniform(rng, 0.01, 0.6);
        double lambda = std::exp(uniform(rng, -2, 2));
        auto a = extremal_marginals(make_params(beta, gamma, lambda, delta));
        auto b = extremal_marginals(make_params(gamma, beta, 1 / lambda, delta));
        EXPECT_EQ(a.regime, b.regime);
        EXPECT_NEAR(a.q_minus, 1 - b.q_plus, 1e-8);
        EXPECT_NEAR(a.q_plus, 1 - b.q_minus, 1e-8);
        nonunique += a.regime == Regime::NonUniqueness;
    }
    EXPECT_GT(nonunique, 5);
}

TEST(Sweep, LogSpacedRows)
{
    auto rows = lambda_sweep(0.2, 0.2, 3, 0.01, 100, 5);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_NEAR(rows[0].params.lambda, 0.01, 1e-15);
    EXPECT_NEAR(rows[2].params.lambda, 1.0, 1e-14);
    EXPECT_NEAR(rows[4].params.lambda, 100, 1e-12);
    EXPECT_EQ(rows[0].point.regime, Regime::Uniqueness);
    EXPECT_EQ(rows[2].point.regime, Regime::NonUniqueness);
    EXPECT_EQ(rows[4].point.regime, Regime::Uniqueness);
}
