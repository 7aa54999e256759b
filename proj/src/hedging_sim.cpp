#include "vulnpricer/hedging_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "vulnpricer/analytic.hpp"
#include "vulnpricer/parallel.hpp"
#include "vulnpricer/rng.hpp"

namespace vulnpricer {

namespace {

/// Each path owns two substreams: stock normals indexed by step, and one
/// uniform for the default time.
struct PathStreams {
    CounterStream stock;
    CounterStream defaults;

    PathStreams(std::uint64_t seed, std::uint32_t path)
        : stock(seed, 2 * path), defaults(seed, 2 * path + 1) {}

    [[nodiscard]] double default_delay(double lambda) const {
        if (lambda == 0.0) return std::numeric_limits<double>::infinity();
        return -std::log(defaults.uniform(0)) / lambda;
    }
};

double relative_residual(double value, double wealth) {
    return std::abs(value - wealth) / std::max(std::abs(wealth), 1e-300);
}

void check_inputs(const RealWorldModel& rw, const HedgeConfig& cfg) {
    if (const auto report = validate(rw, cfg); !report.ok()) throw ValidationError(report.summary());
}

}  // namespace

ValidationReport validate(const RealWorldModel& rw, const HedgeConfig& cfg) {
    ValidationReport report;
    if (!std::isfinite(rw.mu)) report.issues.push_back({Severity::Violation, "mu finite"});
    if (!(rw.lambda_p >= 0.0)) report.issues.push_back({Severity::Violation, "lambda_p >= 0"});
    if (rw.lambda_p == 0.0) {
        report.issues.push_back({Severity::Warning, "lambda_p = 0: default never happens"});
    }
    if (cfg.n_steps < 1) report.issues.push_back({Severity::Violation, "n_steps >= 1"});
    if (cfg.strategy_sigma && !(*cfg.strategy_sigma > 0.0)) {
        report.issues.push_back({Severity::Violation, "strategy sigma > 0"});
    }
    return report;
}

HedgeRunReport replicate_bond(const MarketParams& params, double maturity, const RealWorldModel& rw,
                              const HedgeConfig& cfg) {
    check_inputs(rw, cfg);
    if (!(maturity > 0.0)) throw ValidationError(kMaturityPositive);
    if (!(params.r_cds >= 0.0)) throw ValidationError(kRcdsNonNegative);

    const double kappa = params.r_cds;
    const double f = params.f;
    const double dt = maturity / static_cast<double>(cfg.n_steps);
    const double tau = PathStreams(cfg.seed, cfg.path).default_delay(rw.lambda_p);

    HedgeRunReport report;
    report.initial_value = std::exp(-(kappa + f) * maturity);
    double wealth = report.initial_value;
    double treasury_account = 1.0;  // B^f with simple accrual

    for (std::size_t k = 0; k < cfg.n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double t_next = k + 1 == cfg.n_steps ? maturity : static_cast<double>(k + 1) * dt;
        Holdings h;
        h.cds = -std::exp(-(kappa + f) * (maturity - t));
        // The CDS is worth zero before default, so the treasury carries all wealth.
        h.treasury = wealth / treasury_account;
        ++report.rebalance_count;
        report.max_self_financing_residual =
            std::max(report.max_self_financing_residual, relative_residual(h.treasury * treasury_account, wealth));
        if (cfg.record_trajectory) report.trajectory.push_back({k, t, 0.0, false, wealth, h});

        if (tau <= t_next) {
            // Left-limit holdings: premium accrues to tau, then each CDS pays 1.
            const double partial = tau - t;
            wealth = h.treasury * treasury_account * (1.0 + f * partial) + h.cds * (1.0 - kappa * partial);
            report.defaulted = true;
            report.default_time = tau;
            if (cfg.record_trajectory) report.trajectory.push_back({k + 1, tau, 0.0, true, wealth, {}});
            break;
        }
        const double next_account = treasury_account * (1.0 + f * (t_next - t));
        wealth = h.treasury * next_account - h.cds * kappa * (t_next - t);
        treasury_account = next_account;
    }
    if (!report.defaulted && cfg.record_trajectory) {
        report.trajectory.push_back({cfg.n_steps, maturity, 0.0, false, wealth, {}});
    }
    report.terminal_wealth = wealth;
    report.payoff = report.defaulted ? 0.0 : 1.0;
    report.terminal_error = wealth - report.payoff;
    return report;
}

HedgeRunReport replicate_option(const Scenario& s, const RealWorldModel& rw, const HedgeConfig& cfg) {
    check_inputs(rw, cfg);
    require_valid(s);

    Scenario model = s;
    if (cfg.strategy_sigma) model.market.sigma = *cfg.strategy_sigma;
    const auto rates = effective_rates(model.market);
    const double beta = model.market.beta;
    const double t0 = s.state.time;
    const double maturity = s.option.maturity;
    const double strike = s.option.strike;
    const double dt = (maturity - t0) / static_cast<double>(cfg.n_steps);
    const double world_sigma = s.market.sigma;
    const PathStreams streams(cfg.seed, cfg.path);
    const double tau = s.state.defaulted ? t0 : t0 + streams.default_delay(rw.lambda_p);

    HedgeRunReport report;
    if (s.state.defaulted) {
        report.defaulted = true;
        report.default_time = t0;
        return report;
    }
    report.initial_value = vulnerable_call_price(model).value;

    const auto bond = [&](double t) { return std::exp(-rates.r_c * (maturity - t)); };
    const auto evolve = [&](double spot, double h, double z) {
        return spot * std::exp((rw.mu - 0.5 * world_sigma * world_sigma) * h + world_sigma * std::sqrt(h) * z);
    };

    double wealth = report.initial_value;
    double spot = s.state.spot;
    double treasury_account = 1.0;

    for (std::size_t k = 0; k < cfg.n_steps; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        const double t_next = k + 1 == cfg.n_steps ? maturity : t0 + static_cast<double>(k + 1) * dt;
        model.state.time = t;
        model.state.spot = spot;
        const double delta = analytic_delta(model);
        const double bond_now = bond(t);

        Holdings h;
        h.treasury = -(1.0 - beta) * delta * spot / treasury_account;
        h.stock = (1.0 - beta) * delta;
        h.repo = beta * delta;
        h.bond = wealth / bond_now;
        ++report.rebalance_count;
        const double post_trade = h.treasury * treasury_account + h.stock * spot + h.bond * bond_now;
        report.max_self_financing_residual =
            std::max(report.max_self_financing_residual, relative_residual(post_trade, wealth));
        if (cfg.record_trajectory) report.trajectory.push_back({k, t, spot, false, wealth, h});

        const double z = streams.stock.normal(k);
        if (tau <= t_next) {
            // Settle at tau with the holdings set at t: hedge gains to tau, then
            // the bond position is lost.
            const double partial = tau - t;
            const double spot_tau = evolve(spot, partial, z);
            wealth = delta * (spot_tau - spot) - rates.f_beta * delta * spot * partial +
                     h.bond * (bond(tau) - bond_now) + wealth - h.bond * bond(tau);
            spot = spot_tau;
            report.defaulted = true;
            report.default_time = tau;
            if (cfg.record_trajectory) report.trajectory.push_back({k + 1, tau, spot, true, wealth, {}});
            break;
        }
        const double spot_next = evolve(spot, t_next - t, z);
        // Treasury and repo gains combine to -f^beta Delta S dt, so h = f makes beta irrelevant.
        wealth += delta * (spot_next - spot) - rates.f_beta * delta * spot * (t_next - t) +
                  h.bond * (bond(t_next) - bond_now);
        treasury_account *= 1.0 + s.market.f * (t_next - t);
        spot = spot_next;
    }
    if (!report.defaulted && cfg.record_trajectory) {
        report.trajectory.push_back({cfg.n_steps, maturity, spot, false, wealth, {}});
    }
    report.terminal_wealth = wealth;
    report.payoff = report.defaulted ? 0.0 : std::max(spot - strike, 0.0);
    report.terminal_error = wealth - report.payoff;
    return report;
}

namespace {

ErrorStats summarize(const std::vector<double>& errors, const std::vector<char>& keep) {
    ErrorStats st;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!keep[i]) continue;
        ++st.count;
        sum += errors[i];
        sum2 += errors[i] * errors[i];
        st.max_abs = std::max(st.max_abs, std::abs(errors[i]));
    }
    if (st.count > 0) {
        st.mean = sum / static_cast<double>(st.count);
        st.rms = std::sqrt(sum2 / static_cast<double>(st.count));
    }
    return st;
}

}  // namespace

HedgeErrorDistribution hedge_error_distribution(const Scenario& s, const RealWorldModel& rw,
                                                const HedgeConfig& cfg, std::size_t n_paths) {
    check_inputs(rw, cfg);
    if (n_paths == 0) throw ValidationError("hedge_error_distribution: n_paths >= 1");
    HedgeErrorDistribution dist;
    dist.errors.resize(n_paths);
    std::vector<char> defaulted(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        HedgeConfig path_cfg = cfg;
        path_cfg.path = static_cast<std::uint32_t>(i);
        path_cfg.record_trajectory = false;
        const auto run = replicate_option(s, rw, path_cfg);
        dist.errors[i] = run.terminal_error;
        defaulted[i] = run.defaulted;
        if (i == 0) dist.initial_value = run.initial_value;
    });
    std::vector<char> all(n_paths, 1);
    std::vector<char> survived(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) survived[i] = !defaulted[i];
    dist.all = summarize(dist.errors, all);
    dist.survived = summarize(dist.errors, survived);
    dist.defaulted = summarize(dist.errors, defaulted);
    return dist;
}

void write_trajectory_csv(const HedgeRunReport& report, std::ostream& out) {
    out << "step,t,S,defaulted,V,treasury,stock,repo,bond,cds\n";
    char buf[320];
    for (const auto& p : report.trajectory) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.step, p.t,
                      p.spot, p.defaulted ? 1 : 0, p.wealth, p.holdings.treasury, p.holdings.stock,
                      p.holdings.repo, p.holdings.bond, p.holdings.cds);
        out << buf;
    }
}

}  // namespace vulnpricer
