#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vulnpricer/core_types.hpp"

namespace vulnpricer {

class NonConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class GridTooCoarse : public NumericalError {
public:
    using NumericalError::NumericalError;
};

enum class Scheme { ExplicitEuler, CrankNicolson };

struct GridSpec {
    std::size_t n_space = 400;  ///< spatial nodes, including both boundaries
    std::size_t n_time = 400;   ///< time steps
    /// Lower bound on the upper boundary as a multiple of max(spot, strike);
    /// widened automatically to cover five standard deviations.
    double s_max_mult = 3.0;
    Scheme scheme = Scheme::CrankNicolson;
    /// Report the Richardson-extrapolated price from a companion solve at
    /// half resolution. The stored grid values are always the raw solve.
    bool extrapolate = true;
    /// When set, GridTooCoarse is raised if the Richardson error estimate
    /// exceeds it.
    std::optional<double> tolerance;
};

[[nodiscard]] ValidationReport validate(const GridSpec& grid);

struct PdeSolution {
    GridSpec grid;
    double ds = 0.0;  ///< node spacing at the strike (spot if strike is zero)
    double dt = 0.0;
    std::vector<double> times;   ///< calendar times, ascending from state.time to maturity
    std::vector<double> spots;   ///< node locations, ascending from 0, clustered around the strike
    std::vector<double> values;  ///< row-major, values[i * spots.size() + j] = v(times[i], spots[j])
    double price = 0.0;          ///< value at (state.time, spot), extrapolated unless disabled
    double raw_price = 0.0;      ///< interpolated from this grid alone
    std::optional<double> richardson_error;

    [[nodiscard]] double at(std::size_t time_index, std::size_t space_index) const {
        return values[time_index * spots.size() + space_index];
    }
    [[nodiscard]] std::span<const double> row(std::size_t time_index) const {
        return {values.data() + time_index * spots.size(), spots.size()};
    }

    /// CSV with header "t,s,v", one line per grid node.
    void write_csv(std::ostream& out) const;
};

/// Solves v_t + (f^beta - delta) s v_s + sigma^2 s^2 v_ss / 2 - r^C v = 0
/// backward from v(T,s) = (s - K)^+ on a sinh-stretched grid whose nodes
/// straddle the strike. Crank-Nicolson starts with two implicit Euler half-steps.
[[nodiscard]] PdeSolution solve_pde(const Scenario& s, const GridSpec& grid = {});

struct ConvergenceReport {
    std::vector<double> ds;
    std::vector<double> prices;
    std::vector<double> errors;  ///< |price - closed form|
    std::vector<double> orders;  ///< between consecutive grids; NaN when the grids do not refine
    std::optional<double> observed_order;  ///< finest pair, unset when undefined
    std::string note;
};

/// Solves on each grid (at least three, successively refined) and reports
/// the observed order of the error against the closed form.
[[nodiscard]] ConvergenceReport convergence_study(const Scenario& s, std::span<const GridSpec> grids);

}  // namespace vulnpricer
