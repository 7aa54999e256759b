#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "vulnpricer/core_types.hpp"

namespace vulnpricer {

/// Real-world dynamics: dS = mu S dt + sigma S dW (sigma from MarketParams) and
/// an exponential default time with intensity lambda_p.
struct RealWorldModel {
    double mu = 0.0;
    double lambda_p = 0.0;
};

struct HedgeConfig {
    std::size_t n_steps = 10000;
    std::uint64_t seed = 1;
    std::uint32_t path = 0;  ///< path index within the seed
    /// Volatility used by the hedger for price and delta; the world keeps params.sigma.
    std::optional<double> strategy_sigma;
    bool record_trajectory = true;
};

[[nodiscard]] ValidationReport validate(const RealWorldModel& rw, const HedgeConfig& cfg);

/// Units held over the interval starting at a rebalance date. The repo
/// contract has zero value; cds is used by the bond hedge only.
struct Holdings {
    double treasury = 0.0;
    double stock = 0.0;
    double repo = 0.0;
    double bond = 0.0;
    double cds = 0.0;
};

struct TrajectoryPoint {
    std::size_t step = 0;
    double t = 0.0;
    double spot = 0.0;
    bool defaulted = false;
    double wealth = 0.0;
    Holdings holdings;  ///< zero at and after default
};

struct HedgeRunReport {
    std::vector<TrajectoryPoint> trajectory;  ///< empty unless recorded
    double initial_value = 0.0;
    double terminal_wealth = 0.0;  ///< at tau if default happened before T, else at T
    double payoff = 0.0;
    double terminal_error = 0.0;   ///< terminal_wealth - payoff
    std::size_t rebalance_count = 0;
    bool defaulted = false;
    std::optional<double> default_time;
    /// Largest |post-trade value - pre-trade wealth| / max(|wealth|, 1e-300) over rebalances.
    double max_self_financing_residual = 0.0;
};

/// Replicates the zero-recovery bond with -e^{-(kappa+f)(T-t)} CDS contracts
/// (kappa = r_cds) and the rest in the treasury account, from t = 0.
[[nodiscard]] HedgeRunReport replicate_bond(const MarketParams& params, double maturity,
                                            const RealWorldModel& rw, const HedgeConfig& cfg);

/// Delta hedge of the vulnerable call from the scenario's state with the
/// treasury/stock/repo/bond strategy; wealth starts at the closed-form price.
[[nodiscard]] HedgeRunReport replicate_option(const Scenario& s, const RealWorldModel& rw,
                                              const HedgeConfig& cfg);

struct ErrorStats {
    std::size_t count = 0;
    double mean = 0.0;
    double rms = 0.0;
    double max_abs = 0.0;
};

struct HedgeErrorDistribution {
    double initial_value = 0.0;
    ErrorStats all;
    ErrorStats survived;
    ErrorStats defaulted;
    std::vector<double> errors;  ///< per path, in path order
};

/// Runs replicate_option for paths 0..n_paths-1 of cfg.seed in parallel.
[[nodiscard]] HedgeErrorDistribution hedge_error_distribution(const Scenario& s, const RealWorldModel& rw,
                                                              const HedgeConfig& cfg, std::size_t n_paths);

/// CSV with header step,t,S,defaulted,V,treasury,stock,repo,bond,cds.
void write_trajectory_csv(const HedgeRunReport& report, std::ostream& out);

}  // namespace vulnpricer
