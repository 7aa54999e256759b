#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scenarios.hpp"
#include "vulnpricer/cli_io.hpp"

using namespace vulnpricer;
namespace fs = std::filesystem;

namespace {

const std::string kExample = std::string(VULNPRICER_DATA) + "/example51.json";

struct Result {
    int code;
    std::string out;
    std::string err;
    [[nodiscard]] nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "vulnpricer");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
    const auto dir = fs::temp_directory_path() / ("vulnpricer_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Params, JsonAndKeyValueAgree) {
    const auto from_json = load_params_file(kExample);
    const auto from_kv = parse_params_text(
        "# example\nf = 0.02\nh=0.03\nr_cds = 0.05\ndelta_div = 0\nsigma = 0.3\nbeta = 1\n"
        "lambda = 0.05\nstrike = 100\nmaturity = 0.1\nspot = 80  # spot\ntime = 0\n");
    EXPECT_EQ(from_json, from_kv);
    EXPECT_EQ(resolve_scenario(from_json), testing_support::example51());
}

TEST(Params, Defaults) {
    const auto s = resolve_scenario(parse_params_text(
        "f=0.01\nh=0.02\nr_cds=0.04\nsigma=0.2\nbeta=0.5\nstrike=100\nmaturity=1\nspot=100\n"));
    EXPECT_EQ(s.market.delta_div, 0.0);
    EXPECT_EQ(s.credit.lambda, 0.04);
    EXPECT_EQ(s.state.time, 0.0);
    EXPECT_FALSE(s.state.defaulted);
}

TEST(Params, Errors) {
    EXPECT_THROW((void)parse_params_text("{\"kappa\": 1}"), ValidationError);
    EXPECT_THROW((void)parse_params_text("{\"f\": \"x\"}"), ValidationError);
    EXPECT_THROW((void)parse_params_text("{\"f\": 1"), ValidationError);
    EXPECT_THROW((void)parse_params_text("f 0.1"), ValidationError);
    EXPECT_THROW((void)parse_params_text("f=0.1x"), ValidationError);
    EXPECT_THROW((void)resolve_scenario(parse_params_text("f=0.1")), ValidationError);
    EXPECT_THROW((void)load_params_file("/nonexistent/params.json"), ValidationError);
    auto p = load_params_file(kExample);
    EXPECT_THROW(apply_override(p, "spot"), ValidationError);
    apply_override(p, "defaulted=1");
    EXPECT_TRUE(resolve_scenario(p).state.defaulted);
    apply_override(p, "defaulted=2");
    EXPECT_THROW((void)resolve_scenario(p), ValidationError);
}

TEST(Params, RoundTripThroughMap) {
    auto s = testing_support::example51();
    s.market.beta = 0.3;
    s.state.defaulted = true;
    EXPECT_EQ(resolve_scenario(to_param_map(s)), s);
}

TEST(Cli, PriceExample51) {
    const auto r = cli({"price", "--params", kExample});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    EXPECT_NEAR(j["value"].get<double>(), testing_support::kExample51Price, 1e-15);
    EXPECT_DOUBLE_EQ(j["q"].get<double>(), 0.04);
    EXPECT_DOUBLE_EQ(j["f_beta"].get<double>(), 0.03);
    EXPECT_DOUBLE_EQ(j["r_c"].get<double>(), 0.07);
    EXPECT_EQ(j["acf_abs_diff"].get<double>(), 0.0);
    EXPECT_EQ(j["params"]["spot"].get<double>(), 80.0);
}

TEST(Cli, OverridesWinOverFile) {
    const auto r = cli({"price", "--params", kExample, "--set", "spot=90", "--set", "spot=95"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.json()["params"]["spot"].get<double>(), 95.0);
}

TEST(Cli, EchoedParamsReingestIdentically) {
    const auto dir = scratch_dir();
    const auto first = cli({"price", "--params", kExample, "--set", "beta=0.37", "--set", "delta_div=0.013"});
    ASSERT_EQ(first.code, 0);
    write_file(dir / "echo.json", first.json()["params"].dump());
    const auto second = cli({"price", "--params", (dir / "echo.json").string()});
    ASSERT_EQ(second.code, 0);
    EXPECT_EQ(first.out, second.out);
}

TEST(Cli, McDeterministic) {
    const auto a = cli({"mc", "--params", kExample, "--seed", "42", "--paths", "100000"});
    const auto b = cli({"mc", "--params", kExample, "--seed", "42", "--paths", "100000"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    const auto c = cli({"mc", "--params", kExample, "--seed", "43", "--paths", "100000"});
    EXPECT_NE(a.out, c.out);
}

TEST(Cli, XcheckAgrees) {
    const auto r = cli({"xcheck", "--params", kExample, "--paths", "100000"});
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(r.json()["agreement"].get<bool>());
}

TEST(Cli, XcheckDefaulted) {
    const auto r = cli({"xcheck", "--params", kExample, "--defaulted", "--paths", "1000"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    for (const auto& [name, v] : j["routes"].items()) EXPECT_EQ(v.get<double>(), 0.0) << name;
    for (const auto& c : j["checks"]) EXPECT_EQ(c["diff"].get<double>(), 0.0);
    EXPECT_TRUE(j["params"]["defaulted"].get<bool>());
}

TEST(Cli, PdeAndGreeks) {
    const auto pde = cli({"pde", "--params", kExample, "--grid", "400x400"});
    ASSERT_EQ(pde.code, 0);
    EXPECT_LT(pde.json()["rel_diff"].get<double>(), 5e-4);
    const auto g = cli({"greeks", "--params", kExample});
    ASSERT_EQ(g.code, 0);
    EXPECT_LT(g.json()["rel_diff"]["d_f"].get<double>(), 1e-5);
}

TEST(Cli, SweepWritesSurfaceFiles) {
    const auto dir = scratch_dir();
    const auto csv = (dir / "surface.csv").string();
    const auto r = cli({"sweep", "--params", kExample, "--out", csv, "--axis1", "f:0:0.1:5", "--axis2", "h:0.01,0.02"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.json()["along_axis1"], "strictly_decreasing");
    EXPECT_EQ(r.json()["along_axis2"], "strictly_increasing");
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "f,h,price,d_f,d_h");
    EXPECT_TRUE(fs::exists(csv + ".matrix"));
    EXPECT_EQ(cli({"sweep", "--params", kExample, "--out", csv, "--axis1", "kappa:0:1:3"}).code, 2);
}

TEST(Cli, OtherSubcommands) {
    const auto cds = cli({"cds-spread", "--params", kExample, "--set", "f=0.1"});
    ASSERT_EQ(cds.code, 0);
    EXPECT_NEAR(cds.json()["spread"].get<double>(), 0.05, 1e-12);
    const auto pw = cli({"cds-spread", "--params", kExample, "--knots", "0:0.01,0.05:0.03"});
    ASSERT_EQ(pw.code, 0);
    EXPECT_GT(pw.json()["spread"].get<double>(), 0.01);
    EXPECT_LT(pw.json()["spread"].get<double>(), 0.03);
    const auto bond = cli({"hedge", "--params", kExample, "--bond", "--steps", "1000", "--paths", "20"});
    ASSERT_EQ(bond.code, 0);
    EXPECT_LT(bond.json()["survived"]["max_abs"].get<double>(), 5e-4);
    const auto opt = cli({"hedge", "--params", kExample, "--steps", "200", "--paths", "20"});
    ASSERT_EQ(opt.code, 0);
    EXPECT_EQ(opt.json()["all"]["count"].get<int>(), 20);
}

TEST(Cli, FormatsAndOutFile) {
    const auto text = cli({"price", "--params", kExample, "--format", "text"});
    ASSERT_EQ(text.code, 0);
    EXPECT_NE(text.out.find("r_c = 0.070000000000000007"), std::string::npos);
    const auto csv = cli({"price", "--params", kExample, "--format", "csv"});
    EXPECT_EQ(csv.out.rfind("key,value\n", 0), 0u);
    const auto path = (scratch_dir() / "price.json").string();
    const auto r = cli({"price", "--params", kExample, "--out", path});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    EXPECT_EQ(nlohmann::json::parse(in)["command"], "price");
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli({"frobnicate"}).code, 1);
    EXPECT_EQ(cli({}).code, 1);
    EXPECT_EQ(cli({"price", "--bogus"}).code, 1);
    EXPECT_EQ(cli({"price", "--format", "xml", "--params", kExample}).code, 1);
    EXPECT_EQ(cli({"--help"}).code, 0);
    EXPECT_EQ(cli({"price", "--params", kExample, "--set", "beta=2"}).code, 2);
    EXPECT_EQ(cli({"price", "--params", kExample, "--set", "kappa=1"}).code, 2);
    EXPECT_EQ(cli({"price", "--set", "f=0.1"}).code, 2);
    EXPECT_EQ(cli({"price", "--params", "/nonexistent.json"}).code, 2);
    EXPECT_EQ(cli({"mc", "--params", kExample, "--paths", "0"}).code, 2);
    EXPECT_EQ(cli({"pde", "--params", kExample, "--grid", "400by400"}).code, 2);
    EXPECT_EQ(cli({"pde", "--params", kExample, "--grid", "400x10", "--scheme", "explicit"}).code, 3);
    EXPECT_EQ(cli({"pde", "--params", kExample, "--grid", "40x40", "--tolerance", "1e-12"}).code, 3);
}
