#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vulnpricer {

/// Thrown when inputs break a domain invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical route fails (blow-up, negative values, no exposure window).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Constant market rates, all continuously compounded per year.
///
/// The CDS spread is the credit input; the counterparty bond return r^C is
/// derived as f + r_cds.
struct MarketParams {
    double f = 0.0;          ///< treasury (unsecured funding) rate
    double h = 0.0;          ///< repo rate
    double r_cds = 0.0;      ///< CDS spread
    double delta_div = 0.0;  ///< continuous dividend yield
    double sigma = 0.0;      ///< lognormal volatility
    double beta = 0.0;       ///< fraction of the stock hedge financed through repo

    bool operator==(const MarketParams&) const = default;
};

struct OptionSpec {
    double strike = 0.0;
    double maturity = 0.0;

    bool operator==(const OptionSpec&) const = default;
};

/// Constant default intensity; survival G(t) = exp(-lambda t).
struct DefaultModel {
    double lambda = 0.0;

    [[nodiscard]] double survival(double t) const;
    bool operator==(const DefaultModel&) const = default;
};

struct MarketState {
    double spot = 0.0;
    double time = 0.0;
    bool defaulted = false;

    bool operator==(const MarketState&) const = default;
};

/// Everything a single pricing call needs.
struct Scenario {
    MarketParams market;
    OptionSpec option;
    DefaultModel credit;
    MarketState state;

    [[nodiscard]] double time_to_maturity() const { return option.maturity - state.time; }
    bool operator==(const Scenario&) const = default;
};

enum class Route { ClosedForm, PDE, MonteCarlo };

[[nodiscard]] const char* to_string(Route route);

struct PriceResult {
    double value = 0.0;
    Route route = Route::ClosedForm;
    double std_error = 0.0;
    std::size_t n_samples_or_gridsize = 0;
};

struct EffectiveRates {
    double f_beta = 0.0;  ///< (1-beta) f + beta h
    double q = 0.0;       ///< r_c - f_beta + delta
    double r_c = 0.0;     ///< f + r_cds
};

[[nodiscard]] EffectiveRates effective_rates(const MarketParams& params);

enum class Severity { Violation, Warning };

struct ValidationIssue {
    Severity severity;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    /// True when no issue has Violation severity; warnings do not block pricing.
    [[nodiscard]] bool ok() const;
    [[nodiscard]] bool has(const std::string& message) const;
    [[nodiscard]] std::string summary() const;
};

// Messages emitted by validate(), exposed so callers and tests can match them.
inline constexpr const char* kSigmaPositive = "sigma > 0";
inline constexpr const char* kBetaRange = "beta in [0,1]";
inline constexpr const char* kRcdsNonNegative = "r_cds >= 0";
inline constexpr const char* kDividendNonNegative = "delta_div >= 0";
inline constexpr const char* kStrikeNonNegative = "strike >= 0";
inline constexpr const char* kMaturityPositive = "maturity > 0";
inline constexpr const char* kLambdaNonNegative = "lambda >= 0";
inline constexpr const char* kSpotPositive = "spot > 0";
inline constexpr const char* kTimeBeforeMaturity = "0 <= time < maturity";
inline constexpr const char* kReplicationDegenerate =
    "replication-degenerate: lambda = 0 (default impossible)";
inline constexpr const char* kLambdaMismatch =
    "lambda != r_cds: pricing-measure intensity should equal the CDS spread";

[[nodiscard]] ValidationReport validate(const MarketParams& params, const OptionSpec& spec);
[[nodiscard]] ValidationReport validate(const Scenario& scenario);

/// Throws ValidationError with the report summary unless the scenario is valid.
void require_valid(const Scenario& scenario);

}  // namespace vulnpricer
