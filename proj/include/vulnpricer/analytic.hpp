#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "vulnpricer/core_types.hpp"

namespace vulnpricer {

/// Inputs of the Black-Scholes call on a dividend-paying stock.
struct BsInputs {
    double spot = 0.0;
    double strike = 0.0;
    double tau = 0.0;         ///< time to maturity T - t
    double rate = 0.0;        ///< discount rate
    double div_yield = 0.0;
    double sigma = 0.0;
};

/// S e^{-q tau} N(d1) - K e^{-r tau} N(d2).
///
/// For sigma sqrt(tau) below 1e-12 the deterministic forward limit is
/// returned. K = 0 gives S e^{-q tau}; S = K = 0 is a domain error.
[[nodiscard]] double bs_call_div(const BsInputs& in);

/// Pre-default stock holding and both d-terms for the replication price.
struct CallTerms {
    double d1 = 0.0;
    double d2 = 0.0;
    double stock_leg = 0.0;   ///< S e^{-q tau} N(d1)
    double strike_leg = 0.0;  ///< K e^{-r tau} N(d2)
    double value = 0.0;       ///< max(stock_leg - strike_leg, 0)
};

/// Closed-form terms of the replication price at the given scenario, ignoring
/// the default indicator. Shared by the price, delta and Greek routines.
[[nodiscard]] CallTerms replication_terms(const Scenario& s);

/// Replication price: Black-Scholes with discount rate r^C and dividend
/// yield q = r^C - f^beta + delta. Zero once defaulted.
[[nodiscard]] PriceResult vulnerable_call_price(const Scenario& s);

/// Same price through the Q^beta factorization
/// e^{-(r_cds + f - f^beta) tau} * BS(rate = f^beta, q = delta).
[[nodiscard]] double vulnerable_call_price_qbeta(const Scenario& s);

/// Adjusted-cash-flow price under the repo-drift measure. Uses the default
/// intensity from s.credit and ignores beta.
[[nodiscard]] PriceResult vulnerable_call_price_acf(const Scenario& s);

/// Zero-recovery bond 1_{tau>t} e^{-(r_cds + f)(T - t)}.
[[nodiscard]] double bond_price(const MarketParams& params, double maturity, const MarketState& state);

/// e^{-q tau} N(d1); zero once defaulted.
[[nodiscard]] double analytic_delta(const Scenario& s);

/// Survival curve G(u) = Q(tau > u) for the fair CDS spread.
class SurvivalCurve {
public:
    /// G(u) = exp(-lambda u).
    static SurvivalCurve exponential(double lambda);

    /// Intensity intensities[i] on (knots[i], knots[i+1]]; knots[0] must be 0
    /// and the last intensity extends past the final knot.
    static SurvivalCurve piecewise_constant(std::vector<double> knots, std::vector<double> intensities);

    /// Survival probabilities at increasing times, joined log-linearly
    /// (i.e. piecewise-constant hazard). times[0] must be 0 with value 1.
    static SurvivalCurve tabulated(const std::vector<double>& times, const std::vector<double>& survival);

    /// Arbitrary nonincreasing survival function; integrated numerically.
    static SurvivalCurve from_function(std::function<double(double)> g);

    [[nodiscard]] double operator()(double u) const;
    [[nodiscard]] bool has_closed_form() const;

    friend double cds_fair_spread(const SurvivalCurve&, double, double, double);

private:
    struct Piecewise {
        std::vector<double> knots;
        std::vector<double> intensities;
    };
    std::variant<Piecewise, std::function<double(double)>> repr_;
};

/// Fair spread kappa(t,T) = -int e^{-fu} dG(u) / int e^{-fu} G(u) du over (t,T].
///
/// Piecewise-constant hazards are integrated in closed form; general curves
/// use adaptive Simpson (tolerance 1e-10) with the Stieltjes numerator
/// integrated by parts. Throws NumericalError when the premium-leg integral
/// is below 1e-14.
[[nodiscard]] double cds_fair_spread(const SurvivalCurve& survival, double f, double t, double maturity);

/// Adaptive Simpson quadrature on [a,b] to absolute tolerance tol.
[[nodiscard]] double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                                      double tol, int max_depth = 50);

}  // namespace vulnpricer
