#include "vulnpricer/cli_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "vulnpricer/analytic.hpp"
#include "vulnpricer/greeks_sweep.hpp"
#include "vulnpricer/hedging_sim.hpp"
#include "vulnpricer/monte_carlo.hpp"
#include "vulnpricer/pde_solver.hpp"

namespace vulnpricer {

namespace {

using Json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

void check_key(const std::string& key) {
    if (std::find(kParamKeys.begin(), kParamKeys.end(), key) == kParamKeys.end()) {
        throw ValidationError("unknown parameter '" + key + "'");
    }
}

double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (key == "defaulted") {
        if (t == "true") return 1.0;
        if (t == "false") return 0.0;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size()) throw ValidationError("parameter '" + key + "': not a number: '" + t + "'");
    return v;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// --- output ----------------------------------------------------------------

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
    } else if (j.is_number_float()) {
        rows.emplace_back(prefix, format_double(j.get<double>()));
    } else if (j.is_string()) {
        rows.emplace_back(prefix, j.get<std::string>());
    } else {
        rows.emplace_back(prefix, j.dump());
    }
}

void emit(const Json& doc, const std::string& format, std::ostream& out) {
    if (format == "json") {
        out << doc.dump(2) << '\n';
        return;
    }
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(doc, "", rows);
    if (format == "csv") {
        out << "key,value\n";
        for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
    } else {
        for (const auto& [k, v] : rows) out << k << " = " << v << '\n';
    }
}

Json params_json(const Scenario& s) {
    Json j;
    for (const auto& [k, v] : to_param_map(s)) j[k] = v;
    j["defaulted"] = s.state.defaulted;
    return j;
}

Json warnings_json(const Scenario& s) {
    Json w = Json::array();
    for (const auto& issue : validate(s).issues) {
        if (issue.severity == Severity::Warning) w.push_back(issue.message);
    }
    return w;
}

double rel_diff(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

// --- run configuration -----------------------------------------------------

struct RunConfig {
    std::string params_path;
    std::vector<std::string> overrides;
    std::string out_path;
    std::string format = "json";
    bool defaulted = false;
    std::uint64_t seed = 42;
    std::optional<std::size_t> paths;
    std::string grid = "400x400";
    std::size_t steps = 10000;
    // pde
    std::string scheme = "cn";
    std::optional<double> tolerance;
    std::string dump_path;
    bool no_extrapolate = false;
    // mc
    std::string mode = "survival";
    bool antithetic = false;
    // greeks
    double bump = kDefaultRateBump;
    double spot_bump = kDefaultSpotBump;
    // sweep
    std::string axis1 = "f:0:0.1:21";
    std::string axis2 = "h:0:0.1:21";
    std::string matrix_path;
    // hedge
    double mu = 0.08;
    std::optional<double> lambda_p;
    std::optional<double> strategy_sigma;
    bool bond = false;
    std::string trajectory_path;
    // cds-spread
    std::string knots;
};

Scenario scenario_from(const RunConfig& cfg) {
    ParamMap params;
    if (!cfg.params_path.empty()) params = load_params_file(cfg.params_path);
    for (const auto& o : cfg.overrides) apply_override(params, o);
    if (cfg.defaulted) params["defaulted"] = 1.0;
    return resolve_scenario(params);
}

GridSpec parse_grid(const std::string& text) {
    const auto x = text.find('x');
    GridSpec g;
    try {
        if (x == std::string::npos) throw std::invalid_argument("no x");
        std::size_t used_n = 0, used_m = 0;
        const std::string n = text.substr(0, x), m = text.substr(x + 1);
        g.n_space = std::stoul(n, &used_n);
        g.n_time = std::stoul(m, &used_m);
        if (used_n != n.size() || used_m != m.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ValidationError("--grid expects NxM, e.g. 400x400, got '" + text + "'");
    }
    return g;
}

Axis parse_axis(const std::string& text) {
    // name:lo:hi:n or name:v1,v2,...
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidAxis("axis expects name:lo:hi:n or name:v1,v2,..., got '" + text + "'");
    Axis axis{text.substr(0, colon), {}};
    const std::string rest = text.substr(colon + 1);
    std::vector<std::string> parts;
    std::stringstream ss(rest);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() == 3) {
        const double lo = parse_number(axis.name, parts[0]);
        const double hi = parse_number(axis.name, parts[1]);
        const double n = parse_number(axis.name, parts[2]);
        if (!(n >= 1.0) || n != std::floor(n)) throw InvalidAxis("axis point count must be a positive integer");
        const auto count = static_cast<std::size_t>(n);
        for (std::size_t i = 0; i < count; ++i) {
            axis.grid.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
        }
    } else if (parts.size() == 1) {
        std::stringstream vs(parts[0]);
        for (std::string v; std::getline(vs, v, ',');) axis.grid.push_back(parse_number(axis.name, v));
    } else {
        throw InvalidAxis("axis expects name:lo:hi:n or name:v1,v2,..., got '" + text + "'");
    }
    return axis;
}

SurvivalCurve parse_knots(const std::string& text, double lambda) {
    if (text.empty()) return SurvivalCurve::exponential(lambda);
    std::vector<double> times, intensities;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ValidationError("--knots expects t:lambda,t:lambda,...");
        times.push_back(parse_number("knot", item.substr(0, colon)));
        intensities.push_back(parse_number("knot", item.substr(colon + 1)));
    }
    return SurvivalCurve::piecewise_constant(times, intensities);
}

// --- subcommands -----------------------------------------------------------

Json cmd_price(const Scenario& s) {
    const auto rates = effective_rates(s.market);
    const double value = vulnerable_call_price(s).value;
    const double acf = vulnerable_call_price_acf(s).value;
    Json doc;
    doc["command"] = "price";
    doc["params"] = params_json(s);
    doc["warnings"] = warnings_json(s);
    doc["value"] = value;
    doc["value_qbeta"] = vulnerable_call_price_qbeta(s);
    doc["value_acf"] = acf;
    doc["acf_abs_diff"] = std::abs(value - acf);
    doc["acf_rel_diff"] = rel_diff(acf, value);
    doc["delta"] = analytic_delta(s);
    doc["q"] = rates.q;
    doc["f_beta"] = rates.f_beta;
    doc["r_c"] = rates.r_c;
    doc["bond_price"] = bond_price(s.market, s.option.maturity, s.state);
    return doc;
}

Json cmd_pde(const Scenario& s, const RunConfig& cfg) {
    GridSpec grid = parse_grid(cfg.grid);
    if (cfg.scheme == "explicit") grid.scheme = Scheme::ExplicitEuler;
    grid.tolerance = cfg.tolerance;
    grid.extrapolate = !cfg.no_extrapolate;
    const auto sol = solve_pde(s, grid);
    if (!cfg.dump_path.empty()) {
        std::ofstream f(cfg.dump_path);
        if (!f) throw ValidationError("cannot write " + cfg.dump_path);
        sol.write_csv(f);
    }
    const double exact = vulnerable_call_price(s).value;
    Json doc;
    doc["command"] = "pde";
    doc["params"] = params_json(s);
    doc["warnings"] = warnings_json(s);
    doc["grid"] = {{"n_space", grid.n_space}, {"n_time", grid.n_time}, {"scheme", cfg.scheme},
                   {"s_max", sol.spots.back()}, {"ds_at_strike", sol.ds}, {"dt", sol.dt}};
    doc["value"] = sol.price;
    doc["raw_value"] = sol.raw_price;
    if (sol.richardson_error) doc["richardson_error"] = *sol.richardson_error;
    doc["closed_form"] = exact;
    doc["abs_diff"] = std::abs(sol.price - exact);
    doc["rel_diff"] = rel_diff(sol.price, exact);
    return doc;
}

McConfig mc_config(const RunConfig& cfg, std::size_t default_paths) {
    McConfig mc;
    mc.n_paths = cfg.paths.value_or(default_paths);
    mc.seed = cfg.seed;
    mc.mode = cfg.mode == "explicit" ? McMode::ExplicitDefault : McMode::SurvivalWeighted;
    mc.antithetic = cfg.antithetic;
    return mc;
}

Json cmd_mc(const Scenario& s, const RunConfig& cfg, std::ostream& err) {
    const McConfig mc = mc_config(cfg, 1000000);
    const auto est = mc_price(s, mc);
    const double acf = vulnerable_call_price_acf(s).value;
    // Wall time stays off stdout so that fixed-seed runs are byte-identical.
    err << "mc: elapsed " << est.elapsed_seconds << " s\n";
    Json doc;
    doc["command"] = "mc";
    doc["params"] = params_json(s);
    doc["warnings"] = warnings_json(s);
    doc["mode"] = to_string(mc.mode);
    doc["seed"] = mc.seed;
    doc["n_paths"] = est.n_paths;
    doc["antithetic"] = mc.antithetic;
    doc["value"] = est.value;
    doc["std_error"] = est.std_error;
    doc["closed_form"] = acf;
    doc["abs_diff"] = std::abs(est.value - acf);
    doc["std_errors_from_closed_form"] = est.std_error > 0.0 ? (est.value - acf) / est.std_error : 0.0;
    return doc;
}

Json greek_json(const GreekSet& g) {
    return {{"value", g.value},   {"d_f", g.d_f},     {"d_h", g.d_h},
            {"d_rcds", g.d_rcds}, {"d_beta", g.d_beta}, {"delta", g.delta},
            {"relative_d_f", g.relative_d_f}, {"relative_d_h", g.relative_d_h}};
}

Json cmd_greeks(const Scenario& s, const RunConfig& cfg) {
    const auto a = analytic_greeks(s);
    const auto fd = fd_greeks(s, cfg.bump, cfg.spot_bump);
    Json doc;
    doc["command"] = "greeks";
    doc["params"] = params_json(s);
    doc["warnings"] = warnings_json(s);
    doc["bump"] = cfg.bump;
    doc["spot_bump_rel"] = cfg.spot_bump;
    doc["analytic"] = greek_json(a);
    doc["finite_difference"] = greek_json(fd);
    doc["rel_diff"] = {{"d_f", rel_diff(fd.d_f, a.d_f)},       {"d_h", rel_diff(fd.d_h, a.d_h)},
                       {"d_rcds", rel_diff(fd.d_rcds, a.d_rcds)}, {"d_beta", rel_diff(fd.d_beta, a.d_beta)},
                       {"delta", rel_diff(fd.delta, a.delta)}};
    if (!s.state.defaulted) {
        const auto root = funding_sign_root(s);
        doc["d_f_sign_root_beta"] = root ? Json(*root) : Json(nullptr);
    }
    return doc;
}

Json cmd_sweep(const Scenario& s, const RunConfig& cfg) {
    const auto r = sweep_surface(s, parse_axis(cfg.axis1), parse_axis(cfg.axis2));
    const std::string csv_path = cfg.out_path.empty() ? "sweep_surface.csv" : cfg.out_path;
    const std::string matrix_path = cfg.matrix_path.empty() ? csv_path + ".matrix" : cfg.matrix_path;
    {
        std::ofstream f(csv_path);
        if (!f) throw ValidationError("cannot write " + csv_path);
        r.write_csv(f);
    }
    {
        std::ofstream f(matrix_path);
        if (!f) throw ValidationError("cannot write " + matrix_path);
        r.write_gnuplot_matrix(f);
    }
    const auto direction = [&](bool along_rows) {
        if (strictly_monotone(r, along_rows, +1)) return "strictly_increasing";
        if (strictly_monotone(r, along_rows, -1)) return "strictly_decreasing";
        return "mixed";
    };
    Json doc;
    doc["command"] = "sweep";
    doc["params"] = params_json(s);
    doc["warnings"] = warnings_json(s);
    doc["axis1"] = {{"name", r.axis1.name}, {"points", r.rows()}, {"min", r.axis1.grid.front()}, {"max", r.axis1.grid.back()}};
    doc["axis2"] = {{"name", r.axis2.name}, {"points", r.cols()}, {"min", r.axis2.grid.front()}, {"max", r.axis2.grid.back()}};
    doc["along_axis1"] = direction(false);
    doc["along_axis2"] = direction(true);
    doc["csv"] = csv_path;
    doc["matrix"] = matrix_path;
    return doc;
}

Json stats_json(const ErrorStats& st) {
    return {{"count", st.count}, {"mean", st.mean}, {"rms", st.rms}, {"max_abs", st.max_abs}};
}

Json cmd_hedge(const Scenario& s, const RunConfig& cfg) {
    const RealWorldModel rw{cfg.mu, cfg.lambda_p.value_or(s.credit.lambda)};
    HedgeConfig hc;
    hc.n_steps = cfg.steps;
    hc.seed = cfg.seed;
    hc.strategy_sigma = cfg.strategy_sigma;
    Json doc;
    doc["command"] = "hedge";
    doc["params"] = params_json(s);
    doc["warnings"] = warnings_json(s);
    doc["target"] = cfg.bond ? "bond" : "option";
    doc["mu"] = rw.mu;
    doc["lambda_p"] = rw.lambda_p;
    doc["n_steps"] = hc.n_steps;
    doc["seed"] = hc.seed;

    const auto dump = [&](const HedgeRunReport& run) {
        if (cfg.trajectory_path.empty()) return;
        std::ofstream f(cfg.trajectory_path);
        if (!f) throw ValidationError("cannot write " + cfg.trajectory_path);
        write_trajectory_csv(run, f);
    };

    if (cfg.bond) {
        const std::size_t n_paths = cfg.paths.value_or(1);
        if (n_paths == 0) throw ValidationError("hedge: n_paths >= 1");
        ErrorStats survived, defaulted;
        double accrual_ratio = 0.0;
        double survived_sq = 0.0, defaulted_sq = 0.0;
        const double dt = s.option.maturity / static_cast<double>(hc.n_steps);
        for (std::size_t p = 0; p < n_paths; ++p) {
            hc.path = static_cast<std::uint32_t>(p);
            hc.record_trajectory = p == 0 && !cfg.trajectory_path.empty();
            const auto run = replicate_bond(s.market, s.option.maturity, rw, hc);
            if (p == 0) dump(run);
            auto& bucket = run.defaulted ? defaulted : survived;
            (run.defaulted ? defaulted_sq : survived_sq) += run.terminal_error * run.terminal_error;
            ++bucket.count;
            bucket.mean += run.terminal_error;
            bucket.max_abs = std::max(bucket.max_abs, std::abs(run.terminal_error));
            if (run.defaulted) {
                const double bound = (s.market.r_cds + s.market.f) * dt *
                                     std::exp(-(s.market.r_cds + s.market.f) * (s.option.maturity - *run.default_time));
                accrual_ratio = std::max(accrual_ratio, std::abs(run.terminal_error) / bound);
            }
        }
        for (auto* b : {&survived, &defaulted}) {
            if (b->count == 0) continue;
            const double n = static_cast<double>(b->count);
            b->mean /= n;
            b->rms = std::sqrt((b == &survived ? survived_sq : defaulted_sq) / n);
        }
        doc["n_paths"] = n_paths;
        doc["initial_value"] = std::exp(-(s.market.r_cds + s.market.f) * s.option.maturity);
        doc["survived"] = stats_json(survived);
        doc["defaulted"] = stats_json(defaulted);
        doc["max_default_error_over_one_step_accrual"] = accrual_ratio;
        return doc;
    }

    const std::size_t n_paths = cfg.paths.value_or(200);
    if (!cfg.trajectory_path.empty()) dump(replicate_option(s, rw, hc));
    const auto dist = hedge_error_distribution(s, rw, hc, n_paths);
    doc["n_paths"] = n_paths;
    if (cfg.strategy_sigma) doc["strategy_sigma"] = *cfg.strategy_sigma;
    doc["initial_value"] = dist.initial_value;
    doc["all"] = stats_json(dist.all);
    doc["survived"] = stats_json(dist.survived);
    doc["defaulted"] = stats_json(dist.defaulted);
    doc["rms_over_initial_value"] = dist.initial_value > 0.0 ? dist.all.rms / dist.initial_value : 0.0;
    return doc;
}

Json cmd_cds(const Scenario& s, const RunConfig& cfg) {
    const auto curve = parse_knots(cfg.knots, s.credit.lambda);
    const double spread = cds_fair_spread(curve, s.market.f, s.state.time, s.option.maturity);
    Json doc;
    doc["command"] = "cds-spread";
    doc["params"] = params_json(s);
    doc["survival"] = cfg.knots.empty() ? "exponential" : "piecewise_constant";
    if (!cfg.knots.empty()) doc["knots"] = cfg.knots;
    doc["spread"] = spread;
    doc["lambda"] = s.credit.lambda;
    doc["r_cds"] = s.market.r_cds;
    return doc;
}

struct Check {
    std::string name;
    double diff;
    double tolerance;
    bool applicable;
};

Json cmd_xcheck(const Scenario& s, const RunConfig& cfg, bool& all_pass) {
    require_valid(s);
    const double cf = vulnerable_call_price(s).value;
    const double qb = vulnerable_call_price_qbeta(s);
    const double acf = vulnerable_call_price_acf(s).value;
    GridSpec grid = parse_grid(cfg.grid);
    const auto pde = solve_pde(s, grid);
    const auto mc = mc_price(s, mc_config(cfg, 200000));
    const auto a = analytic_greeks(s);
    const auto fd = fd_greeks(s);

    const bool acf_comparable = s.market.beta == 1.0 && s.credit.lambda == s.market.r_cds;
    std::vector<Check> checks{
        {"qbeta_vs_closed_form", std::abs(qb - cf), 1e-12 * std::abs(cf) + 1e-300, true},
        {"acf_vs_closed_form", std::abs(acf - cf), 1e-12 * std::abs(cf) + 1e-300, acf_comparable},
        {"pde_vs_closed_form", std::abs(pde.price - cf), 5e-4 * std::abs(cf) + 1e-10, true},
        {"mc_vs_acf", std::abs(mc.value - acf), 4.0 * mc.std_error + 1e-14, true},
        {"greek_d_f_vs_fd", std::abs(fd.d_f - a.d_f), 1e-5 * std::abs(a.d_f) + 1e-12, true},
        {"greek_d_h_vs_fd", std::abs(fd.d_h - a.d_h), 1e-5 * std::abs(a.d_h) + 1e-12, true},
        {"greek_d_rcds_vs_fd", std::abs(fd.d_rcds - a.d_rcds), 1e-5 * std::abs(a.d_rcds) + 1e-12, true},
    };

    Json doc;
    doc["command"] = "xcheck";
    doc["params"] = params_json(s);
    doc["warnings"] = warnings_json(s);
    doc["routes"] = {{"closed_form", cf},
                     {"closed_form_qbeta", qb},
                     {"acf", acf},
                     {"pde", pde.price},
                     {"mc", mc.value},
                     {"mc_std_error", mc.std_error}};
    Json list = Json::array();
    all_pass = true;
    for (const auto& c : checks) {
        const bool pass = !c.applicable || c.diff <= c.tolerance;
        all_pass = all_pass && pass;
        list.push_back({{"name", c.name}, {"applicable", c.applicable}, {"diff", c.diff},
                        {"tolerance", c.tolerance}, {"pass", pass}});
    }
    doc["checks"] = list;
    doc["agreement"] = all_pass;
    return doc;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--params", cfg.params_path, "parameter file (JSON or key=value lines)");
    sub->add_option("--set", cfg.overrides, "override a parameter, key=value (repeatable)");
    sub->add_option("--out", cfg.out_path, "write output here instead of stdout");
    sub->add_option("--format", cfg.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_flag("--defaulted", cfg.defaulted, "price in the post-default state");
}

}  // namespace

// --- parameters --------------------------------------------------------------

ParamMap parse_params_text(const std::string& text) {
    ParamMap params;
    const std::string body = trim(text);
    if (!body.empty() && body.front() == '{') {
        Json j;
        try {
            j = Json::parse(body);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(std::string("parameter file: invalid JSON: ") + e.what());
        }
        for (const auto& [key, value] : j.items()) {
            check_key(key);
            if (key == "defaulted" && value.is_boolean()) {
                params[key] = value.get<bool>() ? 1.0 : 0.0;
            } else if (value.is_number()) {
                params[key] = value.get<double>();
            } else {
                throw ValidationError("parameter '" + key + "': expected a number");
            }
        }
        return params;
    }
    std::stringstream ss(text);
    std::size_t line_no = 0;
    for (std::string line; std::getline(ss, line);) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("parameter file line " + std::to_string(line_no) + ": expected key=value");
        }
        apply_override(params, line);
    }
    return params;
}

ParamMap load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read parameter file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_params_text(ss.str());
}

void apply_override(ParamMap& params, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ValidationError("expected key=value, got '" + assignment + "'");
    const std::string key = trim(assignment.substr(0, eq));
    check_key(key);
    params[key] = parse_number(key, assignment.substr(eq + 1));
}

Scenario resolve_scenario(const ParamMap& params) {
    const auto get = [&](const std::string& key) {
        const auto it = params.find(key);
        if (it == params.end()) throw ValidationError("missing parameter '" + key + "'");
        return it->second;
    };
    const auto get_or = [&](const std::string& key, double fallback) {
        const auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    for (const auto& [key, value] : params) check_key(key);
    Scenario s;
    s.market = {.f = get("f"),
                .h = get("h"),
                .r_cds = get("r_cds"),
                .delta_div = get_or("delta_div", 0.0),
                .sigma = get("sigma"),
                .beta = get("beta")};
    s.option = {.strike = get("strike"), .maturity = get("maturity")};
    s.credit.lambda = get_or("lambda", s.market.r_cds);
    const double defaulted = get_or("defaulted", 0.0);
    if (defaulted != 0.0 && defaulted != 1.0) throw ValidationError("parameter 'defaulted' must be 0 or 1");
    s.state = {.spot = get("spot"), .time = get_or("time", 0.0), .defaulted = defaulted == 1.0};
    return s;
}

ParamMap to_param_map(const Scenario& s) {
    return {{"f", s.market.f},
            {"h", s.market.h},
            {"r_cds", s.market.r_cds},
            {"delta_div", s.market.delta_div},
            {"sigma", s.market.sigma},
            {"beta", s.market.beta},
            {"lambda", s.credit.lambda},
            {"strike", s.option.strike},
            {"maturity", s.option.maturity},
            {"spot", s.state.spot},
            {"time", s.state.time},
            {"defaulted", s.state.defaulted ? 1.0 : 0.0}};
}

// --- entry point -------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Vulnerable European call pricing under funding, repo and credit risk", "vulnpricer"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* price = app.add_subcommand("price", "closed-form price in both parametrizations");
    auto* pde = app.add_subcommand("pde", "Crank-Nicolson finite differences vs closed form");
    auto* mc = app.add_subcommand("mc", "Monte Carlo vs closed form");
    auto* greeks = app.add_subcommand("greeks", "analytic funding Greeks and finite differences");
    auto* sweep = app.add_subcommand("sweep", "price surface over two parameters");
    auto* hedge = app.add_subcommand("hedge", "discrete replication of the option or the bond");
    auto* cds = app.add_subcommand("cds-spread", "fair CDS spread for a survival curve");
    auto* xcheck = app.add_subcommand("xcheck", "run every route and report agreement");
    for (auto* sub : {price, pde, mc, greeks, sweep, hedge, cds, xcheck}) add_common(sub, cfg);

    for (auto* sub : {pde, xcheck}) sub->add_option("--grid", cfg.grid, "space x time nodes, e.g. 400x400");
    pde->add_option("--scheme", cfg.scheme, "cn or explicit")->check(CLI::IsMember({"cn", "explicit"}));
    pde->add_option("--tolerance", cfg.tolerance, "fail if the Richardson error estimate exceeds this");
    pde->add_option("--dump", cfg.dump_path, "write the full grid as CSV (t,s,v)");
    pde->add_flag("--no-extrapolate", cfg.no_extrapolate, "report the single-grid price");

    for (auto* sub : {mc, hedge, xcheck}) {
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--paths", cfg.paths, "number of paths");
    }
    for (auto* sub : {mc, xcheck}) {
        sub->add_option("--mode", cfg.mode, "survival or explicit")->check(CLI::IsMember({"survival", "explicit"}));
        sub->add_flag("--antithetic", cfg.antithetic, "antithetic normal pairs");
    }

    greeks->add_option("--bump", cfg.bump, "absolute rate bump");
    greeks->add_option("--spot-bump", cfg.spot_bump, "relative spot bump");

    sweep->add_option("--axis1", cfg.axis1, "rows: name:lo:hi:n or name:v1,v2,...");
    sweep->add_option("--axis2", cfg.axis2, "columns: name:lo:hi:n or name:v1,v2,...");
    sweep->add_option("--matrix", cfg.matrix_path, "gnuplot matrix path (default <out>.matrix)");

    hedge->add_option("--steps", cfg.steps, "rebalancing steps");
    hedge->add_option("--mu", cfg.mu, "real-world drift");
    hedge->add_option("--lambda-p", cfg.lambda_p, "real-world default intensity (default: lambda)");
    hedge->add_option("--strategy-sigma", cfg.strategy_sigma, "volatility used by the hedger");
    hedge->add_flag("--bond", cfg.bond, "replicate the defaultable bond instead of the option");
    hedge->add_option("--trajectory", cfg.trajectory_path, "CSV trajectory of path 0");

    cds->add_option("--knots", cfg.knots, "piecewise hazard t0:l0,t1:l1,... (t0 = 0); default exponential(lambda)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        const Scenario s = scenario_from(cfg);
        Json doc;
        int code = kExitOk;
        if (price->parsed()) {
            doc = cmd_price(s);
        } else if (pde->parsed()) {
            doc = cmd_pde(s, cfg);
        } else if (mc->parsed()) {
            doc = cmd_mc(s, cfg, err);
        } else if (greeks->parsed()) {
            doc = cmd_greeks(s, cfg);
        } else if (sweep->parsed()) {
            doc = cmd_sweep(s, cfg);
        } else if (hedge->parsed()) {
            doc = cmd_hedge(s, cfg);
        } else if (cds->parsed()) {
            doc = cmd_cds(s, cfg);
        } else {
            bool ok = true;
            doc = cmd_xcheck(s, cfg, ok);
            if (!ok) code = kExitNumerical;
        }

        // sweep writes its surface to --out; its summary always goes to stdout.
        if (!cfg.out_path.empty() && !sweep->parsed()) {
            std::ofstream f(cfg.out_path);
            if (!f) throw ValidationError("cannot write " + cfg.out_path);
            emit(doc, cfg.format, f);
        } else {
            emit(doc, cfg.format, out);
        }
        if (code != kExitOk) err << "error: routes disagree beyond tolerance\n";
        return code;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace vulnpricer
