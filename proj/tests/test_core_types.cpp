#include <gtest/gtest.h>

#include <random>

#include "scenarios.hpp"
#include "vulnpricer/core_types.hpp"

using namespace vulnpricer;

TEST(Validate, Example51IsOk) {
    auto s = testing_support::example51();
    const auto report = validate(s);
    EXPECT_TRUE(report.ok()) << report.summary();
    EXPECT_TRUE(report.issues.empty()) << report.summary();
}

TEST(Validate, NegativeSigma) {
    auto s = testing_support::example51();
    s.market.sigma = -0.1;
    const auto report = validate(s.market, s.option);
    EXPECT_FALSE(report.ok());
    EXPECT_TRUE(report.has(kSigmaPositive));
}

TEST(Validate, BetaOutOfRange) {
    auto s = testing_support::example51();
    s.market.beta = 1.5;
    const auto report = validate(s.market, s.option);
    EXPECT_FALSE(report.ok());
    EXPECT_TRUE(report.has(kBetaRange));
    EXPECT_FALSE(report.has(kSigmaPositive));
}

TEST(Validate, ZeroIntensityIsDegenerateButPriceable) {
    auto s = testing_support::example51();
    s.market.r_cds = 0.0;
    s.credit.lambda = 0.0;
    const auto report = validate(s);
    EXPECT_TRUE(report.ok());
    EXPECT_TRUE(report.has(kReplicationDegenerate));
}

TEST(Validate, WarnsWhenIntensityDiffersFromSpread) {
    auto s = testing_support::example51();
    s.credit.lambda = 0.07;
    const auto report = validate(s);
    EXPECT_TRUE(report.ok());
    EXPECT_TRUE(report.has(kLambdaMismatch));
}

TEST(Validate, StateChecks) {
    auto s = testing_support::example51();
    s.state.time = s.option.maturity;
    s.state.spot = 0.0;
    const auto report = validate(s);
    EXPECT_TRUE(report.has(kTimeBeforeMaturity));
    EXPECT_TRUE(report.has(kSpotPositive));
    EXPECT_THROW(require_valid(s), ValidationError);
}

TEST(Validate, NanIsRejected) {
    auto s = testing_support::example51();
    s.market.sigma = std::nan("");
    EXPECT_FALSE(validate(s).ok());
}

TEST(EffectiveRates, RepoFunded) {
    const auto r = effective_rates({.f = 0.02, .h = 0.03, .r_cds = 0.05, .beta = 1.0});
    EXPECT_DOUBLE_EQ(r.f_beta, 0.03);
    EXPECT_DOUBLE_EQ(r.r_c, 0.07);
    EXPECT_NEAR(r.q, 0.04, 1e-15);
}

TEST(EffectiveRates, TreasuryFunded) {
    const auto r = effective_rates({.f = 0.02, .h = 0.03, .r_cds = 0.05, .beta = 0.0});
    EXPECT_EQ(r.f_beta, 0.02);
    EXPECT_DOUBLE_EQ(r.q, 0.05);
}

TEST(EffectiveRates, CreditFreeLimit) {
    const auto r = effective_rates({.f = 0.037, .h = 0.037, .r_cds = 0.0, .beta = 0.3});
    EXPECT_EQ(r.q, 0.0);
    EXPECT_EQ(r.r_c, 0.037);
}

TEST(EffectiveRates, Properties) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rate(-0.02, 0.12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        MarketParams p{.f = rate(rng), .h = rate(rng), .r_cds = 0.1 * unit(rng),
                       .delta_div = 0.05 * unit(rng), .sigma = 0.2, .beta = unit(rng)};

        // Endpoints are exact.
        auto p0 = p, p1 = p;
        p0.beta = 0.0;
        p1.beta = 1.0;
        EXPECT_EQ(effective_rates(p0).f_beta, p.f);
        EXPECT_EQ(effective_rates(p1).f_beta, p.h);

        // q is affine in beta with slope -(h - f).
        auto pm = p;
        pm.beta = 0.5;
        const double q0 = effective_rates(p0).q;
        const double qm = effective_rates(pm).q;
        const double q1 = effective_rates(p1).q;
        EXPECT_NEAR(qm - q0, q1 - qm, 1e-15);
        EXPECT_NEAR(q1 - q0, -(p.h - p.f), 1e-15);

        // r^C - q = f^beta - delta.
        const auto r = effective_rates(p);
        EXPECT_NEAR(r.r_c - r.q, r.f_beta - p.delta_div, 1e-15);
    }
}

TEST(DefaultModel, Survival) {
    DefaultModel m{.lambda = 0.05};
    EXPECT_DOUBLE_EQ(m.survival(0.0), 1.0);
    EXPECT_DOUBLE_EQ(m.survival(2.0), std::exp(-0.1));
    EXPECT_EQ(DefaultModel{}.survival(10.0), 1.0);
}
