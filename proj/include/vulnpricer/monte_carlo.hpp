#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "vulnpricer/core_types.hpp"

namespace vulnpricer {

class InvalidConfig : public ValidationError {
public:
    using ValidationError::ValidationError;
};

enum class McMode { SurvivalWeighted, ExplicitDefault };

[[nodiscard]] const char* to_string(McMode mode);

struct McConfig {
    std::size_t n_paths = 100000;
    std::uint64_t seed = 1;
    McMode mode = McMode::SurvivalWeighted;
    bool antithetic = false;
    /// Default intensity; the scenario's credit.lambda when unset.
    std::optional<double> lambda;
};

/// n_paths >= 1 is required; fewer than 1000 paths only warns.
[[nodiscard]] ValidationReport validate(const McConfig& cfg);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    McMode mode = McMode::SurvivalWeighted;
    double sample_variance = 0.0;  ///< per independent sample (pair average when antithetic)
    double elapsed_seconds = 0.0;

    [[nodiscard]] PriceResult to_price_result() const {
        return {value, Route::MonteCarlo, std_error, n_paths};
    }
};

/// Exact one-step lognormal terminal spot under drift h - delta, discounted at
/// f. Stock and default draws come from separate substreams of cfg.seed.
[[nodiscard]] McEstimate mc_price(const Scenario& s, const McConfig& cfg);

/// Var(ExplicitDefault) / Var(SurvivalWeighted) on identical seeds and paths.
[[nodiscard]] double mc_variance_ratio(const Scenario& s, const McConfig& cfg);

}  // namespace vulnpricer
