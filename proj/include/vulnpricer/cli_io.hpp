#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vulnpricer/core_types.hpp"

namespace vulnpricer {

/// Parameter keys accepted in files and --set. `defaulted` is optional (0/1
/// or a JSON boolean); delta_div, time and defaulted default to 0, lambda to r_cds.
inline const std::vector<std::string> kParamKeys{"f",      "h",        "r_cds", "delta_div", "sigma",  "beta",
                                                 "lambda", "strike",   "maturity", "spot",   "time", "defaulted"};

using ParamMap = std::map<std::string, double>;

/// Parses either a JSON object or key=value lines ('#' starts a comment).
/// Unknown keys and non-numeric values raise ValidationError.
[[nodiscard]] ParamMap parse_params_text(const std::string& text);
[[nodiscard]] ParamMap load_params_file(const std::string& path);

/// "key=value" into map; later calls win.
void apply_override(ParamMap& params, const std::string& assignment);

/// Fills defaults and builds the scenario. Missing required keys raise ValidationError.
[[nodiscard]] Scenario resolve_scenario(const ParamMap& params);
[[nodiscard]] ParamMap to_param_map(const Scenario& s);

/// Exit codes returned by run().
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitValidation = 2, kExitNumerical = 3 };

/// Entry point behind the vulnpricer executable. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vulnpricer
