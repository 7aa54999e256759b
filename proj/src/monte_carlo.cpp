#include "vulnpricer/monte_carlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "vulnpricer/parallel.hpp"
#include "vulnpricer/rng.hpp"

namespace vulnpricer {

namespace {

constexpr std::uint32_t kStockStream = 0;
constexpr std::uint32_t kDefaultStream = 1;
constexpr std::size_t kBatch = std::size_t{1} << 16;

/// Running count / mean / sum of squared deviations.
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        n += 1.0;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        const double total = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / total;
        m2 += o.m2 + d * d * n * o.n / total;
        n = total;
    }
};

struct PathModel {
    double spot, strike, tau, drift_term, vol, disc, survival, lambda;
    McMode mode;
    CounterStream stock, defaults;

    /// Discounted, default-weighted payoff for normal draw z on path `path`.
    double sample(double z, std::uint64_t path) const {
        const double s_t = spot * std::exp(drift_term + vol * z);
        const double payoff = std::max(s_t - strike, 0.0);
        double weight = survival;
        if (mode == McMode::ExplicitDefault) {
            // tau_default - t ~ Exp(lambda); survives past T iff -log(U)/lambda > tau.
            const bool alive = lambda == 0.0 || -std::log(defaults.uniform(path)) / lambda > tau;
            weight = alive ? 1.0 : 0.0;
        }
        return disc * weight * payoff;
    }
};

}  // namespace

const char* to_string(McMode mode) {
    return mode == McMode::SurvivalWeighted ? "survival_weighted" : "explicit_default";
}

ValidationReport validate(const McConfig& cfg) {
    ValidationReport report;
    if (cfg.n_paths == 0) report.issues.push_back({Severity::Violation, "n_paths >= 1"});
    if (cfg.antithetic && cfg.n_paths % 2 != 0) {
        report.issues.push_back({Severity::Violation, "antithetic requires an even n_paths"});
    }
    if (cfg.lambda && !(*cfg.lambda >= 0.0)) report.issues.push_back({Severity::Violation, kLambdaNonNegative});
    if (cfg.n_paths > 0 && cfg.n_paths < 1000) {
        report.issues.push_back({Severity::Warning, "n_paths < 1000: estimate not fit for reporting"});
    }
    return report;
}

McEstimate mc_price(const Scenario& s, const McConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    if (const auto report = validate(cfg); !report.ok()) throw InvalidConfig(report.summary());
    require_valid(s);

    McEstimate est;
    est.n_paths = cfg.n_paths;
    est.mode = cfg.mode;
    if (s.state.defaulted) return est;

    const double tau = s.time_to_maturity();
    const double sigma = s.market.sigma;
    const double lambda = cfg.lambda.value_or(s.credit.lambda);
    const PathModel model{s.state.spot,
                          s.option.strike,
                          tau,
                          (s.market.h - s.market.delta_div - 0.5 * sigma * sigma) * tau,
                          sigma * std::sqrt(tau),
                          std::exp(-s.market.f * tau),
                          std::exp(-lambda * tau),
                          lambda,
                          cfg.mode,
                          CounterStream(cfg.seed, kStockStream),
                          CounterStream(cfg.seed, kDefaultStream)};

    // One sample per path, or per antithetic pair (z, -z) with independent default draws.
    const std::size_t n_samples = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    const std::size_t n_batches = (n_samples + kBatch - 1) / kBatch;
    std::vector<Moments> batches(n_batches);
    parallel_for(n_batches, [&](std::size_t b) {
        Moments m;
        const std::size_t end = std::min(n_samples, (b + 1) * kBatch);
        for (std::size_t i = b * kBatch; i < end; ++i) {
            const double z = model.stock.normal(i);
            if (cfg.antithetic) {
                m.add(0.5 * (model.sample(z, 2 * i) + model.sample(-z, 2 * i + 1)));
            } else {
                m.add(model.sample(z, i));
            }
        }
        batches[b] = m;
    });

    // Pairwise tree merge in batch order keeps the result independent of thread count.
    while (batches.size() > 1) {
        std::vector<Moments> next;
        for (std::size_t i = 0; i < batches.size(); i += 2) {
            Moments m = batches[i];
            if (i + 1 < batches.size()) m.merge(batches[i + 1]);
            next.push_back(m);
        }
        batches.swap(next);
    }
    const Moments& total = batches.front();

    est.value = std::max(total.mean, 0.0);
    est.sample_variance = total.n > 1.0 ? total.m2 / (total.n - 1.0) : 0.0;
    est.std_error = std::sqrt(est.sample_variance / total.n);
    est.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return est;
}

double mc_variance_ratio(const Scenario& s, const McConfig& cfg) {
    McConfig sw = cfg;
    sw.mode = McMode::SurvivalWeighted;
    McConfig ex = cfg;
    ex.mode = McMode::ExplicitDefault;
    const double var_sw = mc_price(s, sw).sample_variance;
    const double var_ex = mc_price(s, ex).sample_variance;
    if (!(var_sw > 0.0)) throw NumericalError("mc_variance_ratio: survival-weighted variance is zero");
    return var_ex / var_sw;
}

}  // namespace vulnpricer
