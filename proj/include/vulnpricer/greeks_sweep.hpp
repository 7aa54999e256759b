#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vulnpricer/core_types.hpp"

namespace vulnpricer {

class InvalidAxis : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Sensitivities in the (f, h, r_cds) coordinates: r^C = f + r_cds moves with f.
struct GreekSet {
    double value = 0.0;
    double d_f = 0.0;
    double d_h = 0.0;
    double d_rcds = 0.0;
    double d_beta = 0.0;
    double delta = 0.0;
    double relative_d_f = 0.0;  ///< d_f / value (0 when the value is 0)
    double relative_d_h = 0.0;  ///< d_h / value (0 when the value is 0)
};

/// d_f = -beta tau V + (1-beta) tau K e^{-r^C tau} N(d2)
/// d_h = beta tau S e^{-q tau} N(d1)
/// d_rcds = -tau V,  d_beta = (h - f) tau S e^{-q tau} N(d1)
[[nodiscard]] GreekSet analytic_greeks(const Scenario& s);

inline constexpr double kDefaultRateBump = 1e-6;
inline constexpr double kDefaultSpotBump = 1e-4;

/// Central differences of the closed form: bump_abs on f, h, r_cds and beta,
/// spot_bump_rel * S on the spot. bump_abs must lie in [1e-8, 1e-3].
[[nodiscard]] GreekSet fd_greeks(const Scenario& s, double bump_abs = kDefaultRateBump,
                                 double spot_bump_rel = kDefaultSpotBump);

struct Axis {
    std::string name;  ///< one of f, h, r_cds, sigma, beta, spot
    std::vector<double> grid;
};

struct SweepResult {
    Axis axis1;  ///< rows
    Axis axis2;  ///< columns
    std::vector<double> prices;  ///< row-major, axis1.grid.size() x axis2.grid.size()
    std::vector<double> d_f;
    std::vector<double> d_h;

    [[nodiscard]] std::size_t rows() const { return axis1.grid.size(); }
    [[nodiscard]] std::size_t cols() const { return axis2.grid.size(); }
    [[nodiscard]] double price(std::size_t i, std::size_t j) const { return prices[i * cols() + j]; }

    /// CSV: axis1,axis2,price,d_f,d_h with the axis names as headers.
    void write_csv(std::ostream& out) const;
    /// gnuplot "nonuniform matrix": first line column count then axis2 values,
    /// then one line per axis1 value followed by its prices.
    void write_gnuplot_matrix(std::ostream& out) const;
};

[[nodiscard]] bool is_sweep_axis(const std::string& name);

/// Sets one named parameter on a scenario. Setting r_cds also moves credit.lambda.
void set_axis_value(Scenario& s, const std::string& name, double value);

[[nodiscard]] SweepResult sweep_surface(const Scenario& base, const Axis& axis1, const Axis& axis2);

/// True if every row (along_rows) or every column is strictly increasing
/// (direction > 0) or strictly decreasing (direction < 0).
[[nodiscard]] bool strictly_monotone(const SweepResult& r, bool along_rows, int direction);

struct RelativeSensitivityReport {
    double tau = 0.0;
    double relative_d_f = 0.0;
    double relative_d_h = 0.0;
    bool d_f_equals_minus_tau = false;  ///< |rel d_f + tau| <= 1e-12
    bool d_h_exceeds_tau = false;       ///< rel d_h > tau
    [[nodiscard]] bool ok() const { return d_f_equals_minus_tau && d_h_exceeds_tau; }
};

/// Requires beta = 1 and a pre-default state.
[[nodiscard]] RelativeSensitivityReport relative_sensitivity_check(const Scenario& s);

/// beta in (0, 1) where d_f changes sign, by bisection; empty if d_f has the
/// same sign at both ends.
[[nodiscard]] std::optional<double> funding_sign_root(const Scenario& s, double tol = 1e-12);

}  // namespace vulnpricer
