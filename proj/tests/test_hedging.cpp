#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "vulnpricer/analytic.hpp"
#include "vulnpricer/hedging_sim.hpp"

using namespace vulnpricer;

namespace {

MarketParams market() {
    return {.f = 0.02, .h = 0.03, .r_cds = 0.05, .delta_div = 0.0, .sigma = 0.2, .beta = 0.5};
}

Scenario in_the_money() {
    Scenario s;
    s.market = market();
    s.option = {.strike = 90.0, .maturity = 1.0};
    s.credit.lambda = 0.05;
    s.state.spot = 100.0;
    return s;
}

HedgeConfig steps(std::size_t n, std::uint64_t seed = 1, std::uint32_t path = 0) {
    HedgeConfig c;
    c.n_steps = n;
    c.seed = seed;
    c.path = path;
    return c;
}

}  // namespace

TEST(BondHedge, NoDefaultPathEndsAtPar) {
    const auto run = replicate_bond(market(), 1.0, {0.08, 0.0}, steps(10000));
    EXPECT_FALSE(run.defaulted);
    EXPECT_LT(std::abs(run.terminal_error), 5e-4);
    // Simple vs continuous accrual: about ((kappa+f)^2 / 2) T dt.
    EXPECT_LT(std::abs(run.terminal_error), 1e-6);
    EXPECT_DOUBLE_EQ(run.initial_value, std::exp(-0.07));
    EXPECT_EQ(run.rebalance_count, 10000u);
}

TEST(BondHedge, DefaultLeavesAtMostOneStepAccrual) {
    const double dt = 1.0 / 1000.0;
    int defaults = 0;
    for (std::uint32_t p = 0; p < 200; ++p) {
        const auto run = replicate_bond(market(), 1.0, {0.0, 1.0}, steps(1000, 9, p));
        if (!run.defaulted) continue;
        ++defaults;
        const double cds_units = std::exp(-0.07 * (1.0 - *run.default_time));
        EXPECT_LE(std::abs(run.terminal_error), 0.07 * dt * cds_units * (1.0 + 1e-9));
        EXPECT_EQ(run.payoff, 0.0);
    }
    EXPECT_GT(defaults, 100);
}

TEST(BondHedge, ErrorShrinksWithSteps) {
    double previous = INFINITY;
    for (std::size_t n : {100u, 1000u, 10000u}) {
        double worst = 0.0;
        for (std::uint32_t p = 0; p < 50; ++p) {
            auto cfg = steps(n, 4, p);
            cfg.record_trajectory = false;
            worst = std::max(worst, std::abs(replicate_bond(market(), 1.0, {0.0, 0.7}, cfg).terminal_error));
        }
        EXPECT_LT(worst, previous) << n;
        previous = worst;
    }
}

TEST(BondHedge, TrajectoryAndSelfFinancing) {
    const auto run = replicate_bond(market(), 2.0, {0.0, 0.0}, steps(50));
    ASSERT_EQ(run.trajectory.size(), 51u);
    EXPECT_LE(run.max_self_financing_residual, 1e-12);
    EXPECT_DOUBLE_EQ(run.trajectory.front().holdings.cds, -std::exp(-0.14));
    EXPECT_DOUBLE_EQ(run.trajectory.back().t, 2.0);
}

TEST(OptionHedge, StartsAtClosedFormPrice) {
    const auto s = in_the_money();
    const auto run = replicate_option(s, {0.08, 0.05}, steps(100));
    EXPECT_EQ(run.initial_value, vulnerable_call_price(s).value);
    EXPECT_EQ(run.trajectory.front().wealth, run.initial_value);
    const auto& h = run.trajectory.front().holdings;
    const double delta = analytic_delta(s);
    EXPECT_DOUBLE_EQ(h.stock, 0.5 * delta);
    EXPECT_DOUBLE_EQ(h.repo, 0.5 * delta);
    EXPECT_DOUBLE_EQ(h.treasury, -0.5 * delta * 100.0);
    EXPECT_DOUBLE_EQ(h.bond, run.initial_value / std::exp(-0.07));
}

TEST(OptionHedge, SelfFinancingAtEveryRebalance) {
    for (std::uint32_t p = 0; p < 20; ++p) {
        const auto run = replicate_option(in_the_money(), {0.08, 0.5}, steps(500, 3, p));
        EXPECT_LE(run.max_self_financing_residual, 1e-12);
    }
}

TEST(OptionHedge, HoldingsZeroAfterDefault) {
    for (std::uint32_t p = 0; p < 50; ++p) {
        const auto run = replicate_option(in_the_money(), {0.08, 2.0}, steps(200, 5, p));
        if (!run.defaulted) continue;
        const auto& last = run.trajectory.back();
        EXPECT_TRUE(last.defaulted);
        EXPECT_EQ(last.holdings.stock, 0.0);
        EXPECT_EQ(last.holdings.bond, 0.0);
        EXPECT_EQ(run.payoff, 0.0);
        EXPECT_EQ(last.t, *run.default_time);
    }
}

TEST(OptionHedge, EarlyDefaultLeavesOneIntervalOfHedgePnl) {
    // Intensity high enough that defaults land in the first step.
    const auto s = in_the_money();
    int first_step = 0;
    for (std::uint32_t p = 0; p < 400; ++p) {
        const auto run = replicate_option(s, {0.08, 50.0}, steps(100, 6, p));
        if (!run.defaulted || *run.default_time > 0.01) continue;
        ++first_step;
        // Only the stock move over [0, tau) is unhedged by the bond jump.
        const double dt_partial = *run.default_time;
        const double move = std::abs(run.trajectory.back().spot - 100.0);
        const double delta = run.trajectory.front().holdings.stock * 2.0;
        EXPECT_NEAR(run.terminal_wealth, delta * (run.trajectory.back().spot - 100.0) - 0.025 * delta * 100.0 * dt_partial,
                    1e-9 * (1.0 + move));
        EXPECT_LT(std::abs(run.terminal_wealth), 10.0 * 0.2 * 100.0 * std::sqrt(0.01));
    }
    EXPECT_GT(first_step, 100);
}

TEST(OptionHedge, ErrorScalesWithRootDt) {
    const auto s = in_the_money();
    const auto coarse = hedge_error_distribution(s, {0.08, 0.05}, steps(625, 2), 300);
    const auto fine = hedge_error_distribution(s, {0.08, 0.05}, steps(2500, 2), 300);
    const double ratio = fine.all.rms / coarse.all.rms;
    EXPECT_GT(ratio, 0.35);
    EXPECT_LT(ratio, 0.65);
}

TEST(OptionHedge, MeasureIndependence) {
    const auto s = in_the_money();
    for (double mu : {-0.1, 0.0, 0.2}) {
        const auto dist = hedge_error_distribution(s, {mu, 0.05}, steps(2500, 8), 100);
        EXPECT_LT(dist.all.rms, 0.02 * dist.initial_value) << mu;
        EXPECT_LT(std::abs(dist.all.mean), 4.0 * dist.all.rms / std::sqrt(100.0)) << mu;
    }
}

TEST(OptionHedge, NoDefaultsWithoutIntensity) {
    const auto dist = hedge_error_distribution(in_the_money(), {0.08, 0.0}, steps(200, 1), 50);
    EXPECT_EQ(dist.defaulted.count, 0u);
    EXPECT_EQ(dist.survived.count, 50u);
    EXPECT_EQ(dist.all.rms, dist.survived.rms);
}

TEST(OptionHedge, BetaIrrelevantWhenRepoEqualsFunding) {
    auto s = in_the_money();
    s.market.h = s.market.f;
    HedgeErrorDistribution first;
    for (double beta : {0.0, 0.5, 1.0}) {
        s.market.beta = beta;
        const auto dist = hedge_error_distribution(s, {0.08, 0.3}, steps(300, 12), 60);
        if (beta == 0.0) {
            first = dist;
            continue;
        }
        EXPECT_EQ(dist.errors, first.errors);
        EXPECT_EQ(dist.initial_value, first.initial_value);
    }
}

TEST(OptionHedge, MisspecifiedVolatilityIsReported) {
    auto cfg = steps(1000, 3);
    cfg.strategy_sigma = 0.3;
    const auto dist = hedge_error_distribution(in_the_money(), {0.08, 0.0}, cfg, 100);
    // Overpricing the option with a higher vol leaves a positive mean error.
    EXPECT_GT(dist.all.mean, 0.0);
    EXPECT_GT(dist.initial_value, vulnerable_call_price(in_the_money()).value);
}

TEST(OptionHedge, DeterministicPerSeedAndPath) {
    const auto a = replicate_option(in_the_money(), {0.08, 0.3}, steps(300, 10, 4));
    const auto b = replicate_option(in_the_money(), {0.08, 0.3}, steps(300, 10, 4));
    const auto c = replicate_option(in_the_money(), {0.08, 0.3}, steps(300, 10, 5));
    EXPECT_EQ(a.terminal_error, b.terminal_error);
    EXPECT_NE(a.terminal_error, c.terminal_error);
}

TEST(OptionHedge, InvalidInputs) {
    EXPECT_THROW((void)replicate_option(in_the_money(), {0.08, -1.0}, steps(10)), ValidationError);
    EXPECT_THROW((void)replicate_option(in_the_money(), {0.08, 0.1}, steps(0)), ValidationError);
    auto cfg = steps(10);
    cfg.strategy_sigma = 0.0;
    EXPECT_THROW((void)replicate_option(in_the_money(), {0.08, 0.1}, cfg), ValidationError);
    EXPECT_THROW((void)replicate_bond(market(), 0.0, {0.0, 0.1}, steps(10)), ValidationError);
}

TEST(OptionHedge, TrajectoryCsv) {
    const auto run = replicate_option(in_the_money(), {0.08, 0.0}, steps(10));
    std::ostringstream out;
    write_trajectory_csv(run, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "step,t,S,defaulted,V,treasury,stock,repo,bond,cds");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 11);
}
