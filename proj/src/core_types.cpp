#include "vulnpricer/core_types.hpp"

#include <algorithm>
#include <cmath>

namespace vulnpricer {

double DefaultModel::survival(double t) const { return std::exp(-lambda * t); }

const char* to_string(Route route) {
    switch (route) {
        case Route::ClosedForm: return "closed_form";
        case Route::PDE: return "pde";
        case Route::MonteCarlo: return "monte_carlo";
    }
    return "unknown";
}

EffectiveRates effective_rates(const MarketParams& params) {
    EffectiveRates rates;
    // std::lerp is exact at beta = 0 and beta = 1 and returns f when h == f.
    rates.f_beta = std::lerp(params.f, params.h, params.beta);
    rates.r_c = params.f + params.r_cds;
    rates.q = rates.r_c - rates.f_beta + params.delta_div;
    return rates;
}

bool ValidationReport::ok() const {
    return std::none_of(issues.begin(), issues.end(),
                        [](const ValidationIssue& i) { return i.severity == Severity::Violation; });
}

bool ValidationReport::has(const std::string& message) const {
    return std::any_of(issues.begin(), issues.end(),
                       [&](const ValidationIssue& i) { return i.message == message; });
}

std::string ValidationReport::summary() const {
    std::string out;
    for (const auto& issue : issues) {
        if (!out.empty()) out += "; ";
        out += issue.severity == Severity::Violation ? "violation: " : "warning: ";
        out += issue.message;
    }
    return out.empty() ? "ok" : out;
}

namespace {

void check(ValidationReport& report, bool condition, const char* message) {
    // NaN fails every comparison, so it lands here too.
    if (!condition) report.issues.push_back({Severity::Violation, message});
}

}  // namespace

ValidationReport validate(const MarketParams& params, const OptionSpec& spec) {
    ValidationReport report;
    check(report, params.sigma > 0.0, kSigmaPositive);
    check(report, params.beta >= 0.0 && params.beta <= 1.0, kBetaRange);
    check(report, params.r_cds >= 0.0, kRcdsNonNegative);
    check(report, params.delta_div >= 0.0, kDividendNonNegative);
    check(report, std::isfinite(params.f) && std::isfinite(params.h), "rates finite");
    check(report, spec.strike >= 0.0 && std::isfinite(spec.strike), kStrikeNonNegative);
    check(report, spec.maturity > 0.0 && std::isfinite(spec.maturity), kMaturityPositive);
    return report;
}

ValidationReport validate(const Scenario& s) {
    ValidationReport report = validate(s.market, s.option);
    check(report, s.credit.lambda >= 0.0 && std::isfinite(s.credit.lambda), kLambdaNonNegative);
    check(report, s.state.spot > 0.0 && std::isfinite(s.state.spot), kSpotPositive);
    check(report, s.state.time >= 0.0 && s.state.time < s.option.maturity, kTimeBeforeMaturity);
    if (s.credit.lambda == 0.0) {
        report.issues.push_back({Severity::Warning, kReplicationDegenerate});
    }
    if (s.credit.lambda != s.market.r_cds) {
        report.issues.push_back({Severity::Warning, kLambdaMismatch});
    }
    return report;
}

void require_valid(const Scenario& scenario) {
    const auto report = validate(scenario);
    if (!report.ok()) throw ValidationError(report.summary());
}

}  // namespace vulnpricer
