#include "vulnpricer/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "vulnpricer/normal.hpp"

namespace vulnpricer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Black call with the forward drift passed separately from the discount
/// and dividend rates, so that algebraically equal drifts computed through
/// different routes do not pick up rounding differences.
CallTerms black_call(double spot, double strike, double tau, double rate, double div_yield,
                     double drift, double sigma) {
    if (spot == 0.0 && strike == 0.0) {
        throw ValidationError("bs_call_div: spot and strike are both zero");
    }
    if (!(spot >= 0.0) || !(strike >= 0.0) || !(tau > 0.0) || !(sigma >= 0.0)) {
        throw ValidationError("bs_call_div: requires spot >= 0, strike >= 0, tau > 0, sigma >= 0");
    }

    CallTerms t;
    const double stock_disc = spot * std::exp(-div_yield * tau);
    const double strike_disc = strike * std::exp(-rate * tau);

    if (strike == 0.0) {
        t.d1 = t.d2 = kInf;
        t.stock_leg = stock_disc;
        t.value = stock_disc;
        return t;
    }
    if (spot == 0.0) {
        t.d1 = t.d2 = -kInf;
        return t;
    }

    const double vol = sigma * std::sqrt(tau);
    if (vol < 1e-12) {
        const double forward = spot * std::exp(drift * tau);
        const bool in_money = forward > strike;
        t.d1 = t.d2 = in_money ? kInf : -kInf;
        t.stock_leg = in_money ? stock_disc : 0.0;
        t.strike_leg = in_money ? strike_disc : 0.0;
        t.value = std::exp(-rate * tau) * std::max(forward - strike, 0.0);
        return t;
    }

    t.d1 = (std::log(spot / strike) + (drift + 0.5 * sigma * sigma) * tau) / vol;
    t.d2 = t.d1 - vol;
    t.stock_leg = stock_disc * normal_cdf(t.d1);
    t.strike_leg = strike_disc * normal_cdf(t.d2);
    t.value = std::max(t.stock_leg - t.strike_leg, 0.0);
    return t;
}

}  // namespace

double bs_call_div(const BsInputs& in) {
    return black_call(in.spot, in.strike, in.tau, in.rate, in.div_yield, in.rate - in.div_yield,
                      in.sigma)
        .value;
}

CallTerms replication_terms(const Scenario& s) {
    const auto rates = effective_rates(s.market);
    // r^C - q = f^beta - delta exactly; pass that drift rather than recomputing it.
    return black_call(s.state.spot, s.option.strike, s.time_to_maturity(), rates.r_c, rates.q,
                      rates.f_beta - s.market.delta_div, s.market.sigma);
}

PriceResult vulnerable_call_price(const Scenario& s) {
    require_valid(s);
    PriceResult result{0.0, Route::ClosedForm, 0.0, 1};
    if (!s.state.defaulted) result.value = replication_terms(s).value;
    return result;
}

double vulnerable_call_price_qbeta(const Scenario& s) {
    require_valid(s);
    if (s.state.defaulted) return 0.0;
    const auto rates = effective_rates(s.market);
    const double tau = s.time_to_maturity();
    const double inner = black_call(s.state.spot, s.option.strike, tau, rates.f_beta,
                                    s.market.delta_div, rates.f_beta - s.market.delta_div,
                                    s.market.sigma)
                             .value;
    return std::exp(-(s.market.r_cds + s.market.f - rates.f_beta) * tau) * inner;
}

PriceResult vulnerable_call_price_acf(const Scenario& s) {
    require_valid(s);
    PriceResult result{0.0, Route::ClosedForm, 0.0, 1};
    if (s.state.defaulted) return result;
    const double discount_rate = s.market.f + s.credit.lambda;
    const double stock_rate = discount_rate - s.market.h + s.market.delta_div;
    result.value = black_call(s.state.spot, s.option.strike, s.time_to_maturity(), discount_rate,
                              stock_rate, s.market.h - s.market.delta_div, s.market.sigma)
                       .value;
    return result;
}

double bond_price(const MarketParams& params, double maturity, const MarketState& state) {
    if (!(state.time <= maturity)) throw ValidationError("bond_price: time must not exceed maturity");
    if (state.defaulted) return 0.0;
    return std::exp(-(params.r_cds + params.f) * (maturity - state.time));
}

double analytic_delta(const Scenario& s) {
    require_valid(s);
    if (s.state.defaulted) return 0.0;
    const auto rates = effective_rates(s.market);
    const auto terms = replication_terms(s);
    return std::exp(-rates.q * s.time_to_maturity()) * normal_cdf(terms.d1);
}

// --- survival curves and CDS spread -------------------------------------

SurvivalCurve SurvivalCurve::exponential(double lambda) {
    return piecewise_constant({0.0}, {lambda});
}

SurvivalCurve SurvivalCurve::piecewise_constant(std::vector<double> knots,
                                                std::vector<double> intensities) {
    if (knots.empty() || knots.size() != intensities.size() || knots.front() != 0.0) {
        throw ValidationError("piecewise_constant: need matching knots/intensities with knots[0] = 0");
    }
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!(intensities[i] >= 0.0)) throw ValidationError("piecewise_constant: intensity < 0");
        if (i > 0 && !(knots[i] > knots[i - 1])) {
            throw ValidationError("piecewise_constant: knots must increase");
        }
    }
    SurvivalCurve curve;
    curve.repr_ = Piecewise{std::move(knots), std::move(intensities)};
    return curve;
}

SurvivalCurve SurvivalCurve::tabulated(const std::vector<double>& times,
                                       const std::vector<double>& survival) {
    if (times.size() < 2 || times.size() != survival.size() || times.front() != 0.0 ||
        survival.front() != 1.0) {
        throw ValidationError("tabulated: need >= 2 points starting at (0, 1)");
    }
    std::vector<double> knots(times.begin(), times.end() - 1);
    std::vector<double> intensities;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(survival[i] > 0.0) || survival[i] > survival[i - 1]) {
            throw ValidationError("tabulated: survival must be positive and nonincreasing");
        }
        intensities.push_back(std::log(survival[i - 1] / survival[i]) / (times[i] - times[i - 1]));
    }
    return piecewise_constant(std::move(knots), std::move(intensities));
}

SurvivalCurve SurvivalCurve::from_function(std::function<double(double)> g) {
    SurvivalCurve curve;
    curve.repr_ = std::move(g);
    return curve;
}

bool SurvivalCurve::has_closed_form() const { return std::holds_alternative<Piecewise>(repr_); }

double SurvivalCurve::operator()(double u) const {
    if (const auto* fn = std::get_if<std::function<double(double)>>(&repr_)) return (*fn)(u);
    const auto& pw = std::get<Piecewise>(repr_);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < pw.knots.size(); ++i) {
        const double end = i + 1 < pw.knots.size() ? pw.knots[i + 1] : kInf;
        if (u <= end) return std::exp(-(cumulative + pw.intensities[i] * (u - pw.knots[i])));
        cumulative += pw.intensities[i] * (end - pw.knots[i]);
    }
    return std::exp(-cumulative);
}

double adaptive_simpson(const std::function<double(double)>& fn, double a, double b, double tol,
                        int max_depth) {
    struct Rec {
        const std::function<double(double)>& fn;
        double go(double a, double b, double fa, double fm, double fb, double whole, double tol,
                  int depth) const {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m);
            const double rm = 0.5 * (m + b);
            const double flm = fn(lm);
            const double frm = fn(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
            return go(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   go(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    };
    const double fa = fn(a);
    const double fb = fn(b);
    const double fm = fn(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Rec{fn}.go(a, b, fa, fm, fb, whole, tol, max_depth);
}

double cds_fair_spread(const SurvivalCurve& survival, double f, double t, double maturity) {
    if (!(maturity > t) || !(t >= 0.0)) throw ValidationError("cds_fair_spread: need 0 <= t < T");
    if (!(survival(t) > 0.0)) throw ValidationError("cds_fair_spread: G(t) must be positive");

    double protection = 0.0;
    double premium = 0.0;

    if (const auto* pw = std::get_if<SurvivalCurve::Piecewise>(&survival.repr_)) {
        // On a segment of constant intensity l starting at a with length L,
        // int e^{-fu} G(u) du = G(a) e^{-fa} L (1 - e^{-(f+l)L}) / ((f+l)L)
        // and the protection integrand is l times the same.
        for (std::size_t i = 0; i < pw->knots.size(); ++i) {
            const double seg_end = i + 1 < pw->knots.size() ? pw->knots[i + 1] : kInf;
            const double a = std::max(pw->knots[i], t);
            const double b = std::min(seg_end, maturity);
            if (!(b > a)) continue;
            const double len = b - a;
            const double x = (f + pw->intensities[i]) * len;
            const double shape = x == 0.0 ? len : -std::expm1(-x) / x * len;
            const double seg = survival(a) * std::exp(-f * a) * shape;
            premium += seg;
            protection += pw->intensities[i] * seg;
        }
    } else {
        const auto integrand = [&](double u) { return std::exp(-f * u) * survival(u); };
        premium = adaptive_simpson(integrand, t, maturity, 1e-10);
        // -int e^{-fu} dG = [e^{-fu} G] boundary terms - f int e^{-fu} G du.
        protection = std::exp(-f * t) * survival(t) - std::exp(-f * maturity) * survival(maturity) -
                     f * premium;
    }

    if (!(premium >= 1e-14)) throw NumericalError("cds_fair_spread: premium leg below 1e-14");
    return protection / premium;
}

}  // namespace vulnpricer
