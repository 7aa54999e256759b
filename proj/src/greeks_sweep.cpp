#include "vulnpricer/greeks_sweep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "vulnpricer/analytic.hpp"
#include "vulnpricer/normal.hpp"
#include "vulnpricer/parallel.hpp"

namespace vulnpricer {

namespace {

constexpr std::array<const char*, 6> kAxes{"f", "h", "r_cds", "sigma", "beta", "spot"};

/// Closed form without validation, so central differences may straddle a
/// domain edge such as r_cds = 0.
double reprice(const Scenario& s) { return replication_terms(s).value; }

}  // namespace

GreekSet analytic_greeks(const Scenario& s) {
    require_valid(s);
    GreekSet g;
    if (s.state.defaulted) return g;

    const auto rates = effective_rates(s.market);
    const auto terms = replication_terms(s);
    const double tau = s.time_to_maturity();
    const double beta = s.market.beta;
    const double v = terms.value;

    g.value = v;
    g.delta = std::exp(-rates.q * tau) * normal_cdf(terms.d1);
    g.d_f = -(beta * tau) * v + (1.0 - beta) * tau * terms.strike_leg;
    g.d_h = beta * tau * terms.stock_leg;
    g.d_rcds = -tau * v;
    g.d_beta = (s.market.h - s.market.f) * tau * terms.stock_leg;
    if (v > 0.0) {
        // Written per unit value so that beta = 1 gives exactly -tau.
        g.relative_d_f = -(beta * tau);
        if (beta != 1.0) g.relative_d_f += (1.0 - beta) * tau * (terms.strike_leg / v);
        g.relative_d_h = beta * tau * (terms.stock_leg / v);
    }
    return g;
}

GreekSet fd_greeks(const Scenario& s, double bump_abs, double spot_bump_rel) {
    require_valid(s);
    if (!(bump_abs >= 1e-8 && bump_abs <= 1e-3)) throw ValidationError("fd_greeks: bump in [1e-8, 1e-3]");
    if (!(spot_bump_rel > 0.0 && spot_bump_rel < 0.5)) throw ValidationError("fd_greeks: spot bump in (0, 0.5)");
    GreekSet g;
    if (s.state.defaulted) return g;

    const auto central = [&](auto&& field, double h) {
        Scenario up = s;
        Scenario down = s;
        field(up) += h;
        field(down) -= h;
        return (reprice(up) - reprice(down)) / (2.0 * h);
    };
    g.value = reprice(s);
    g.d_f = central([](Scenario& x) -> double& { return x.market.f; }, bump_abs);
    g.d_h = central([](Scenario& x) -> double& { return x.market.h; }, bump_abs);
    g.d_rcds = central([](Scenario& x) -> double& { return x.market.r_cds; }, bump_abs);
    g.d_beta = central([](Scenario& x) -> double& { return x.market.beta; }, bump_abs);
    g.delta = central([](Scenario& x) -> double& { return x.state.spot; }, spot_bump_rel * s.state.spot);
    if (g.value > 0.0) {
        g.relative_d_f = g.d_f / g.value;
        g.relative_d_h = g.d_h / g.value;
    }
    return g;
}

bool is_sweep_axis(const std::string& name) {
    return std::find(kAxes.begin(), kAxes.end(), name) != kAxes.end();
}

void set_axis_value(Scenario& s, const std::string& name, double value) {
    if (name == "f") {
        s.market.f = value;
    } else if (name == "h") {
        s.market.h = value;
    } else if (name == "r_cds") {
        s.market.r_cds = value;
        s.credit.lambda = value;
    } else if (name == "sigma") {
        s.market.sigma = value;
    } else if (name == "beta") {
        s.market.beta = value;
    } else if (name == "spot") {
        s.state.spot = value;
    } else {
        throw InvalidAxis("unknown sweep axis '" + name + "' (expected f, h, r_cds, sigma, beta or spot)");
    }
}

SweepResult sweep_surface(const Scenario& base, const Axis& axis1, const Axis& axis2) {
    for (const auto* axis : {&axis1, &axis2}) {
        if (!is_sweep_axis(axis->name)) {
            throw InvalidAxis("unknown sweep axis '" + axis->name + "' (expected f, h, r_cds, sigma, beta or spot)");
        }
        if (axis->grid.empty()) throw InvalidAxis("sweep axis '" + axis->name + "' has an empty grid");
    }
    if (axis1.name == axis2.name) throw InvalidAxis("sweep axes must differ");

    SweepResult r{axis1, axis2, {}, {}, {}};
    const std::size_t n = r.rows() * r.cols();
    r.prices.resize(n);
    r.d_f.resize(n);
    r.d_h.resize(n);
    parallel_for(r.rows(), [&](std::size_t i) {
        for (std::size_t j = 0; j < r.cols(); ++j) {
            Scenario s = base;
            set_axis_value(s, axis1.name, axis1.grid[i]);
            set_axis_value(s, axis2.name, axis2.grid[j]);
            const auto g = analytic_greeks(s);
            r.prices[i * r.cols() + j] = vulnerable_call_price(s).value;
            r.d_f[i * r.cols() + j] = g.d_f;
            r.d_h[i * r.cols() + j] = g.d_h;
        }
    });
    return r;
}

bool strictly_monotone(const SweepResult& r, bool along_rows, int direction) {
    const std::size_t outer = along_rows ? r.rows() : r.cols();
    const std::size_t inner = along_rows ? r.cols() : r.rows();
    for (std::size_t a = 0; a < outer; ++a) {
        for (std::size_t b = 1; b < inner; ++b) {
            const double prev = along_rows ? r.price(a, b - 1) : r.price(b - 1, a);
            const double cur = along_rows ? r.price(a, b) : r.price(b, a);
            if (direction > 0 ? !(cur > prev) : !(cur < prev)) return false;
        }
    }
    return true;
}

void SweepResult::write_csv(std::ostream& out) const {
    out << axis1.name << ',' << axis2.name << ",price,d_f,d_h\n";
    char buf[160];
    for (std::size_t i = 0; i < rows(); ++i) {
        for (std::size_t j = 0; j < cols(); ++j) {
            const std::size_t k = i * cols() + j;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", axis1.grid[i], axis2.grid[j],
                          prices[k], d_f[k], d_h[k]);
            out << buf;
        }
    }
}

void SweepResult::write_gnuplot_matrix(std::ostream& out) const {
    char buf[32];
    out << cols();
    for (double x : axis2.grid) {
        std::snprintf(buf, sizeof buf, " %.17g", x);
        out << buf;
    }
    out << '\n';
    for (std::size_t i = 0; i < rows(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", axis1.grid[i]);
        out << buf;
        for (std::size_t j = 0; j < cols(); ++j) {
            std::snprintf(buf, sizeof buf, " %.17g", price(i, j));
            out << buf;
        }
        out << '\n';
    }
}

RelativeSensitivityReport relative_sensitivity_check(const Scenario& s) {
    if (s.market.beta != 1.0) throw ValidationError("relative_sensitivity_check: requires beta = 1");
    if (s.state.defaulted) throw ValidationError("relative_sensitivity_check: requires a pre-default state");
    const auto g = analytic_greeks(s);
    RelativeSensitivityReport r;
    r.tau = s.time_to_maturity();
    r.relative_d_f = g.relative_d_f;
    r.relative_d_h = g.relative_d_h;
    r.d_f_equals_minus_tau = std::abs(g.relative_d_f + r.tau) <= 1e-12;
    r.d_h_exceeds_tau = g.relative_d_h > r.tau;
    return r;
}

std::optional<double> funding_sign_root(const Scenario& s, double tol) {
    const auto d_f_at = [&](double beta) {
        Scenario x = s;
        x.market.beta = beta;
        return analytic_greeks(x).d_f;
    };
    double lo = 0.0, hi = 1.0;
    double f_lo = d_f_at(lo);
    const double f_hi = d_f_at(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0)) return std::nullopt;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = d_f_at(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace vulnpricer
