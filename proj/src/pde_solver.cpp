#include "vulnpricer/pde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <ostream>
#include <string>

#include "vulnpricer/analytic.hpp"

namespace vulnpricer {

namespace {

constexpr double kNegativeTolerance = -1e-12;
constexpr double kDeviations = 5.0;
constexpr double kConcentration = 0.5;
constexpr double kMinWidth = 0.01;

/// Tridiagonal operator rows for the interior nodes 1..M-1 in
/// time-to-maturity form v_tau = L v.
struct Operator {
    std::vector<double> lower, diag, upper;
};

Operator build_operator(const std::vector<double>& nodes, double sigma, double drift, double rate) {
    const std::size_t m = nodes.size() - 1;
    Operator op;
    op.lower.resize(m + 1);
    op.diag.resize(m + 1);
    op.upper.resize(m + 1);
    for (std::size_t j = 1; j < m; ++j) {
        const double s = nodes[j];
        const double hm = nodes[j] - nodes[j - 1];
        const double hp = nodes[j + 1] - nodes[j];
        const double diffusion = 0.5 * sigma * sigma * s * s;
        const double convection = drift * s;
        // Three-point first and second derivative weights on a nonuniform mesh.
        const double d1_lo = -hp / (hm * (hm + hp));
        const double d1_mid = (hp - hm) / (hm * hp);
        const double d1_hi = hm / (hp * (hm + hp));
        const double d2_lo = 2.0 / (hm * (hm + hp));
        const double d2_mid = -2.0 / (hm * hp);
        const double d2_hi = 2.0 / (hp * (hm + hp));
        op.lower[j] = diffusion * d2_lo + convection * d1_lo;
        op.diag[j] = diffusion * d2_mid + convection * d1_mid - rate;
        op.upper[j] = diffusion * d2_hi + convection * d1_hi;
    }
    return op;
}

/// Thomas algorithm on rows 1..m-1; x[0] and x[m] hold the boundary values.
void thomas_solve(const std::vector<double>& a, const std::vector<double>& b,
                  const std::vector<double>& c, std::vector<double>& rhs, std::vector<double>& x,
                  std::vector<double>& scratch) {
    const std::size_t m = x.size() - 1;
    rhs[1] -= a[1] * x[0];
    rhs[m - 1] -= c[m - 1] * x[m];
    scratch[1] = c[1] / b[1];
    rhs[1] = rhs[1] / b[1];
    for (std::size_t j = 2; j < m; ++j) {
        const double denom = b[j] - a[j] * scratch[j - 1];
        scratch[j] = c[j] / denom;
        rhs[j] = (rhs[j] - a[j] * rhs[j - 1]) / denom;
    }
    x[m - 1] = rhs[m - 1];
    for (std::size_t j = m - 1; j-- > 1;) x[j] = rhs[j] - scratch[j] * x[j + 1];
}

/// One theta-scheme step of length dt from v (at tau) to v (at tau + dt).
class Stepper {
public:
    Stepper(const Operator& op, double dt, double theta) : op_(op), dt_(dt), theta_(theta) {
        const std::size_t n = op.diag.size();
        a_.resize(n);
        b_.resize(n);
        c_.resize(n);
        for (std::size_t j = 1; j + 1 < n; ++j) {
            a_[j] = -theta * dt * op.lower[j];
            b_[j] = 1.0 - theta * dt * op.diag[j];
            c_[j] = -theta * dt * op.upper[j];
            const double off = (j > 1 ? std::abs(a_[j]) : 0.0) + (j + 2 < n ? std::abs(c_[j]) : 0.0);
            if (theta > 0.0 && std::abs(b_[j]) < off) {
                throw NonConvergence("pde: implicit matrix is not diagonally dominant");
            }
        }
        rhs_.resize(n);
        scratch_.resize(n);
    }

    void step(std::vector<double>& v, double lower_bc, double upper_bc) {
        const std::size_t m = v.size() - 1;
        const double explicit_weight = (1.0 - theta_) * dt_;
        for (std::size_t j = 1; j < m; ++j) {
            rhs_[j] = v[j] + explicit_weight * (op_.lower[j] * v[j - 1] + op_.diag[j] * v[j] +
                                                op_.upper[j] * v[j + 1]);
        }
        v[0] = lower_bc;
        v[m] = upper_bc;
        if (theta_ == 0.0) {
            for (std::size_t j = 1; j < m; ++j) v[j] = rhs_[j];
        } else {
            thomas_solve(a_, b_, c_, rhs_, v, scratch_);
        }
    }

private:
    const Operator& op_;
    double dt_;
    double theta_;
    std::vector<double> a_, b_, c_, rhs_, scratch_;
};

double cubic_interpolate(const std::vector<double>& xs, std::span<const double> ys, double x) {
    const std::size_t n = xs.size();
    auto base = static_cast<std::ptrdiff_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 2;
    base = std::clamp<std::ptrdiff_t>(base, 0, static_cast<std::ptrdiff_t>(n) - 4);
    double result = 0.0;
    for (std::ptrdiff_t i = 0; i < 4; ++i) {
        double weight = 1.0;
        for (std::ptrdiff_t k = 0; k < 4; ++k) {
            if (k == i) continue;
            weight *= (x - xs[base + k]) / (xs[base + i] - xs[base + k]);
        }
        result += weight * ys[base + i];
    }
    return result;
}

struct Mesh {
    std::vector<double> nodes;
    double h = 0.0;  ///< spacing at the concentration point
};

/// Nodes s = c + a sinh(xi) on a uniform xi grid from s = 0 to about s_max,
/// with the strike halfway between two nodes.
Mesh make_mesh(std::size_t m, double s_max, double center, double alpha, double strike) {
    const double xi_lo = std::asinh(-center / alpha);
    const double xi_hi = std::asinh((s_max - center) / alpha);
    double dxi = (xi_hi - xi_lo) / static_cast<double>(m);
    if (strike > 0.0) {
        const double xi_k = std::asinh((strike - center) / alpha);
        const double cells = std::max(std::round((xi_k - xi_lo) / dxi - 0.5), 0.0);
        dxi = (xi_k - xi_lo) / (cells + 0.5);
    }
    Mesh mesh;
    mesh.h = alpha * dxi;
    mesh.nodes.resize(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        mesh.nodes[j] = center + alpha * std::sinh(xi_lo + static_cast<double>(j) * dxi);
    }
    mesh.nodes[0] = 0.0;
    return mesh;
}

PdeSolution solve_once(const Scenario& s, const GridSpec& grid) {
    const auto rates = effective_rates(s.market);
    const double strike = s.option.strike;
    const double tau_total = s.time_to_maturity();
    const double drift = rates.f_beta - s.market.delta_div;
    const double sigma = s.market.sigma;

    const std::size_t m = grid.n_space - 1;
    const double width = sigma * std::sqrt(tau_total);
    const double mult = std::max(grid.s_max_mult, std::exp(kDeviations * width + std::abs(drift) * tau_total));
    const double center = strike > 0.0 ? strike : s.state.spot;
    const double alpha = kConcentration * std::max(width, kMinWidth) * center;
    const Mesh mesh = make_mesh(m, mult * std::max(s.state.spot, strike), center, alpha, strike);
    const double dt = tau_total / static_cast<double>(grid.n_time);

    const Operator op = build_operator(mesh.nodes, sigma, drift, rates.r_c);
    if (grid.scheme == Scheme::ExplicitEuler) {
        // Forward Euler keeps every explicit weight nonnegative only if
        // dt max_j |L_jj| <= 1; beyond it the scheme amplifies the kink.
        const double stiffest = -*std::min_element(op.diag.begin() + 1, op.diag.end() - 1);
        if (dt * stiffest > 1.0) {
            throw NonConvergence("pde: explicit scheme violates the stability bound (dt max|L_jj| = " +
                                 std::to_string(dt * stiffest) + " > 1)");
        }
    }

    PdeSolution sol;
    sol.grid = grid;
    sol.ds = mesh.h;
    sol.dt = dt;
    sol.spots = mesh.nodes;
    const double s_max = sol.spots[m];

    sol.times.resize(grid.n_time + 1);
    for (std::size_t i = 0; i <= grid.n_time; ++i) {
        sol.times[i] = s.option.maturity - static_cast<double>(grid.n_time - i) * dt;
    }
    sol.times.front() = s.state.time;
    sol.values.assign((grid.n_time + 1) * (m + 1), 0.0);

    std::vector<double> v(m + 1);
    for (std::size_t j = 0; j <= m; ++j) v[j] = std::max(sol.spots[j] - strike, 0.0);

    const auto upper_bc = [&](double tau) {
        return s_max * std::exp(-rates.q * tau) - strike * std::exp(-rates.r_c * tau);
    };
    const auto store = [&](std::size_t step) {
        // Row index counts calendar time forward; step counts time to maturity.
        std::copy(v.begin(), v.end(), sol.values.begin() + static_cast<std::ptrdiff_t>((grid.n_time - step) * (m + 1)));
    };
    store(0);

    const bool cn = grid.scheme == Scheme::CrankNicolson;
    Stepper main_step(op, dt, cn ? 0.5 : 0.0);

    for (std::size_t n = 0; n < grid.n_time; ++n) {
        const double tau_next = static_cast<double>(n + 1) * dt;
        if (cn && n == 0) {
            Stepper half(op, 0.5 * dt, 1.0);
            half.step(v, 0.0, upper_bc(0.5 * dt));
            half.step(v, 0.0, upper_bc(tau_next));
        } else {
            main_step.step(v, 0.0, upper_bc(tau_next));
        }
        for (auto& x : v) {
            if (!std::isfinite(x) || x < kNegativeTolerance) {
                throw NonConvergence("pde: solution became negative or non-finite at step " +
                                     std::to_string(n + 1));
            }
            x = std::max(x, 0.0);
        }
        store(n + 1);
    }

    sol.price = s.state.defaulted ? 0.0 : cubic_interpolate(sol.spots, sol.row(0), s.state.spot);
    sol.price = std::max(sol.price, 0.0);
    return sol;
}

}  // namespace

ValidationReport validate(const GridSpec& grid) {
    ValidationReport report;
    if (grid.n_space < 16) report.issues.push_back({Severity::Violation, "n_space >= 16"});
    if (grid.n_time < 8) report.issues.push_back({Severity::Violation, "n_time >= 8"});
    if (!(grid.s_max_mult >= 3.0)) report.issues.push_back({Severity::Violation, "s_max_mult >= 3"});
    if (grid.tolerance && !(*grid.tolerance > 0.0)) {
        report.issues.push_back({Severity::Violation, "tolerance > 0"});
    }
    return report;
}

void PdeSolution::write_csv(std::ostream& out) const {
    out << "t,s,v\n";
    char buf[96];
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t j = 0; j < spots.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", times[i], spots[j], at(i, j));
            out << buf;
        }
    }
}

PdeSolution solve_pde(const Scenario& s, const GridSpec& grid) {
    require_valid(s);
    if (const auto report = validate(grid); !report.ok()) throw ValidationError(report.summary());

    PdeSolution fine = solve_once(s, grid);
    fine.raw_price = fine.price;
    if (s.state.defaulted || !(grid.extrapolate || grid.tolerance)) return fine;

    GridSpec coarse = grid;
    coarse.n_space = (grid.n_space - 1) / 2 + 1;
    coarse.n_time = grid.n_time / 2;
    coarse.tolerance.reset();
    if (!validate(coarse).ok()) {
        if (grid.tolerance) throw GridTooCoarse("pde: grid too small for a Richardson estimate");
        return fine;
    }
    const PdeSolution companion = solve_once(s, coarse);
    // Strike snapping makes the refinement ratio only approximately 2.
    const double ratio = companion.ds / fine.ds;
    const double correction = (fine.raw_price - companion.price) / (ratio * ratio - 1.0);
    fine.richardson_error = std::abs(correction);
    if (grid.tolerance && *fine.richardson_error > *grid.tolerance) {
        throw GridTooCoarse("pde: Richardson error estimate " + std::to_string(*fine.richardson_error) +
                            " exceeds tolerance");
    }
    if (grid.extrapolate) fine.price = std::max(fine.raw_price + correction, 0.0);
    return fine;
}

ConvergenceReport convergence_study(const Scenario& s, std::span<const GridSpec> grids) {
    if (grids.size() < 3) throw ValidationError("convergence_study: need at least three grids");
    const double exact = vulnerable_call_price(s).value;

    ConvergenceReport report;
    for (const auto& g : grids) {
        GridSpec plain = g;
        plain.tolerance.reset();
        plain.extrapolate = false;
        const auto sol = solve_pde(s, plain);
        report.ds.push_back(sol.ds);
        report.prices.push_back(sol.raw_price);
        report.errors.push_back(std::abs(sol.raw_price - exact));
    }
    for (std::size_t i = 0; i + 1 < grids.size(); ++i) {
        const double ratio = report.ds[i] / report.ds[i + 1];
        double order = std::numeric_limits<double>::quiet_NaN();
        if (ratio > 1.0 + 1e-9 && report.errors[i + 1] > 0.0 && report.errors[i] > 0.0) {
            order = std::log(report.errors[i] / report.errors[i + 1]) / std::log(ratio);
        }
        report.orders.push_back(order);
    }
    if (std::isfinite(report.orders.back())) {
        report.observed_order = report.orders.back();
    } else {
        report.note = "order undefined: grids do not refine or errors vanish";
    }
    return report;
}

}  // namespace vulnpricer
