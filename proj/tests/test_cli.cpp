#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "szego/config.hpp"
#include "szego/experiments.hpp"
#include "szego/output.hpp"

using namespace szego;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("szego_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int run_lab(const std::string& args) {
    const int status = std::system((std::string(SZEGO_LAB_PATH) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* small_config = R"({"grid": {"n": 1024, "L": 64}, "eps": 0.02, "t_final": 1.0, "stride": 250,
  "potential": {"kind": "gaussian", "amplitude": 1.0, "center": 0.0, "width": 1.0}, "seed": 3})";

}  // namespace

TEST_CASE("defaults and explicit values parse") {
    const auto c = parse_config("{}");
    CHECK(c.n == 8192);
    CHECK(c.L == 256.0);
    CHECK(c.delta == doctest::Approx(0.35));
    const auto d = parse_config(small_config);
    CHECK(d.n == 1024);
    CHECK(d.eps == doctest::Approx(0.02));
    CHECK(d.t_final(d.eps) == doctest::Approx(1.0));
    CHECK(d.seed == 3);
}

TEST_CASE("delta outside (0, 1/2) is a validation error with its path") {
    try {
        parse_config(R"({"delta": 0.7})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("config.delta") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(R"({"delta": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"eps": -1})"), ConfigError);
}

TEST_CASE("schema errors name the offending key") {
    auto message = [](const char* text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message(R"({"grid": {"n": 1000}})").find("config.grid.n") != std::string::npos);
    CHECK(message(R"({"potential": {"kind": "gaussian", "width": -1}})").find("config.potential.width") !=
          std::string::npos);
    CHECK(message(R"({"potential": {"kind": "square"}})").find("config.potential.kind") != std::string::npos);
    CHECK(message(R"({"bogus": 1})").find("config.bogus") != std::string::npos);
    CHECK(message(R"({"t_final": {"policy": "fixed"}})").find("config.t_final.value") != std::string::npos);
    CHECK(message(R"({"grid": {"n": 64, "L": 16}})").find("config.soliton.mu") != std::string::npos);
    CHECK(message("{not json").find("malformed") != std::string::npos);
}

TEST_CASE("horizon policies") {
    const auto th = parse_config(R"({"t_final": {"policy": "theorem_horizon", "c0_fit": 32}, "delta": 0.35})");
    const double eps = 0.01;
    CHECK(th.t_final(eps) ==
          doctest::Approx(0.35 / (6.0 * std::log(32.0)) * std::pow(eps, -0.15) * std::log(100.0)).epsilon(1e-12));
    const auto ep = parse_config(R"({"t_final": {"policy": "eps_power", "exponent": 0.5}})");
    CHECK(ep.t_final(0.04) == doctest::Approx(5.0));
    CHECK_THROWS_AS(th.t_final(0.0), ConfigError);
}

TEST_CASE("tracking options map onto the tracker") {
    const auto c = parse_config(
        R"({"tracking": {"effective_model": "line", "velocity": "centered", "newton_tolerance": 1e-12},
            "mu_window": [0.25, 4]})");
    const auto o = c.track_options();
    CHECK(o.model == EffectiveModel::Line);
    CHECK(o.velocity == VelocityMethod::Centered);
    CHECK(o.newton.tolerance == doctest::Approx(1e-12));
    CHECK(o.mu_window_low == doctest::Approx(0.25));
    CHECK(o.mu_window_high == doctest::Approx(4.0));
}

TEST_CASE("CSV rows carry 17 significant digits and a fixed column count") {
    const auto dir = scratch_dir("csv");
    {
        CsvWriter w((dir / "a.csv").string(), {"x", "y"});
        w.row({0.1, 1.0 / 3.0});
        CHECK_THROWS_AS(w.row({1.0}), std::logic_error);
    }
    CHECK(slurp(dir / "a.csv") == "x,y\n0.10000000000000001,0.33333333333333331\n");
    CHECK(format_number(2.0) == "2");
}

TEST_CASE("log-log slope of a power law") {
    const std::vector<double> x{0.04, 0.02, 0.01};
    std::vector<double> y;
    for (double e : x) y.push_back(3.0 * std::pow(e, 0.85));
    CHECK(loglog_slope(x, y) == doctest::Approx(0.85).epsilon(1e-12));
    CHECK(std::isnan(loglog_slope({1.0, 2.0}, {0.0, 1.0})));
}

TEST_CASE("thread count can be overridden from the environment") {
    unsetenv("SZEGO_LAB_THREADS");
    CHECK(resolve_workers(3) == 3);
    setenv("SZEGO_LAB_THREADS", "5", 1);
    CHECK(resolve_workers(1) == 5);
    setenv("SZEGO_LAB_THREADS", "junk", 1);
    CHECK(resolve_workers(2) == 2);
    unsetenv("SZEGO_LAB_THREADS");
}

TEST_CASE("simulate is deterministic and writes the documented files") {
    const auto c = parse_config(small_config);
    const auto d1 = scratch_dir("sim1"), d2 = scratch_dir("sim2");
    const auto r1 = cmd_simulate(c, d1.string(), true);
    cmd_simulate(c, d2.string(), false);
    CHECK(slurp(d1 / "pde.csv") == slurp(d2 / "pde.csv"));
    CHECK(fs::exists(d1 / "conservation.json"));
    CHECK(fs::exists(d1 / "conservation.svg"));
    CHECK(r1.mass_drift < 1e-8);
    CHECK(r1.hamiltonian_drift < 1e-7);
    std::istringstream lines(slurp(d1 / "pde.csv"));
    std::string line;
    std::getline(lines, line);
    CHECK(line == "t,norm_L2,norm_H12,mass,hamiltonian");
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 4);
        ++rows;
    }
    CHECK(rows == 5);
}

TEST_CASE("track writes track, effective and metrics files") {
    auto c = parse_config(small_config);
    const auto dir = scratch_dir("track");
    const auto run = cmd_track(c, dir.string(), true);
    for (const char* f : {"track.csv", "effective.csv", "metrics.json", "w_norm.svg", "deviations.svg"})
        CHECK(fs::exists(dir / f));
    CHECK(slurp(dir / "track.csv").rfind("t,a,alpha,phi,mu,w_h12,x_norm,da,dalpha,dphi,dmu\n", 0) == 0);
    CHECK(run.report.times.size() == run.effective.size());
    CHECK(slurp(dir / "metrics.json").find("sup_w_h12") != std::string::npos);
}

TEST_CASE("constant potential keeps mu and alpha on the effective values") {
    auto c = parse_config(R"({"grid": {"n": 1024, "L": 64}, "eps": 0.05, "t_final": 2.0, "stride": 200,
      "potential": {"kind": "constant", "value": 0.5}})");
    const auto run = track_run(c, c.eps);
    CHECK(run.metrics.sup_dev[1] < 1e-9);
    CHECK(run.metrics.sup_dev[3] < 1e-9);
}

TEST_CASE("sweep needs at least three geometric eps values") {
    auto c = parse_config(R"({"eps_list": [0.01]})");
    CHECK_THROWS_AS(cmd_sweep(c, scratch_dir("sweep_bad").string(), false, 1), ConfigError);
    c = parse_config(R"({"eps_list": [0.04, 0.02, 0.005]})");
    CHECK_THROWS_AS(cmd_sweep(c, scratch_dir("sweep_bad2").string(), false, 1), ConfigError);
}

TEST_CASE("sweep on a small grid fits slopes and writes a summary") {
    auto c = parse_config(R"({"grid": {"n": 1024, "L": 64}, "eps_list": [0.04, 0.02, 0.01], "t_final": 1.0,
      "stride": 100})");
    const auto dir = scratch_dir("sweep");
    const auto res = cmd_sweep(c, dir.string(), false, 2);
    CHECK(res.runs.size() == 3);
    CHECK(std::isfinite(res.slope_w));
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "eps_0.01" / "track.csv"));
}

TEST_CASE("command line exit codes") {
    const auto dir = scratch_dir("cli");
    std::ofstream(dir / "bad.json") << R"({"delta": 0.7})";
    std::ofstream(dir / "ok.json") << small_config;
    CHECK(run_lab("simulate --config " + (dir / "bad.json").string()) == 2);
    CHECK(run_lab("simulate --config " + (dir / "missing.json").string()) == 2);
    CHECK(run_lab("frobnicate") == 2);
    CHECK(run_lab("simulate --config " + (dir / "ok.json").string() + " --out " + (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out" / "pde.csv"));
    // A tubular exceedance is a runtime failure.
    std::ofstream(dir / "far.json") << R"({"grid": {"n": 1024, "L": 64}, "eps": 3.0, "t_final": 20.0, "stride": 100,
      "tracking": {"tubular_radius": 0.01}})";
    CHECK(run_lab("track --config " + (dir / "far.json").string() + " --out " + (dir / "far").string()) == 1);
}
