#include "szego/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace szego {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw ConfigError(path + ": " + msg); }

void only_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
}

double number_or(const json& j, const char* key, const std::string& path, double fallback) {
    return j.contains(key) ? number(j.at(key), path + "." + key) : fallback;
}

std::size_t count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() <= 0) fail(path, "expected a positive integer");
    return static_cast<std::size_t>(j.get<long long>());
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace

PotentialSpec PotentialConfig::build() const {
    if (kind == "gaussian") return PotentialSpec::gaussian(amplitude, center, width);
    if (kind == "sech2") return PotentialSpec::sech2(amplitude, center, width);
    if (kind == "constant") return PotentialSpec::constant(value);
    return PotentialSpec::table(xs, bs);
}

double ExperimentConfig::t_final(double e) const {
    switch (horizon.kind) {
        case HorizonPolicy::Kind::Fixed:
            return horizon.value;
        case HorizonPolicy::Kind::TheoremHorizon:
            if (!(e > 0.0 && e < 1.0)) throw ConfigError("config.t_final: theorem_horizon needs 0 < eps < 1");
            return delta / (6.0 * std::log(horizon.c0_fit)) * std::pow(e, -(0.5 - delta)) * std::log(1.0 / e);
        case HorizonPolicy::Kind::EpsPower:
            if (!(e > 0.0)) throw ConfigError("config.t_final: eps_power needs eps > 0");
            return std::pow(e, -horizon.exponent);
    }
    return horizon.value;
}

TrackOptions ExperimentConfig::track_options() const {
    TrackOptions o;
    o.model = effective_model;
    o.velocity = velocity;
    o.newton.tolerance = newton_tolerance;
    o.newton.tubular_radius = tubular_radius;
    o.mu_window_low = mu_min / soliton.mu;
    o.mu_window_high = mu_max / soliton.mu;
    return o;
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    const std::string root = "config";
    only_keys(j, root,
              {"grid", "soliton", "potential", "eps", "delta", "t_final", "dt", "stride", "out", "seed", "eps_list",
               "tracking", "mu_window", "snapshots", "parallel"});
    ExperimentConfig c;

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        only_keys(g, root + ".grid", {"n", "L"});
        if (g.contains("n")) c.n = count(g.at("n"), root + ".grid.n");
        c.L = number_or(g, "L", root + ".grid", c.L);
        if (c.n < 16 || (c.n & (c.n - 1)) != 0) fail(root + ".grid.n", "must be a power of two >= 16");
        if (!(c.L > 0.0)) fail(root + ".grid.L", "must be positive");
    }

    if (j.contains("mu_window")) {
        const auto w = numbers(j.at("mu_window"), root + ".mu_window");
        if (w.size() != 2 || !(w[0] > 0.0) || !(w[1] > w[0])) fail(root + ".mu_window", "expected [mu_min, mu_max] with 0 < mu_min < mu_max");
        if (w[0] < 1.0 / 64.0 || w[1] > 64.0) fail(root + ".mu_window", "must lie inside [1/64, 64]");
        c.mu_min = w[0];
        c.mu_max = w[1];
    }

    if (j.contains("soliton")) {
        const auto& s = j.at("soliton");
        only_keys(s, root + ".soliton", {"a", "alpha", "phi", "mu"});
        c.soliton.a = number_or(s, "a", root + ".soliton", 0.0);
        c.soliton.alpha = number_or(s, "alpha", root + ".soliton", 1.0);
        c.soliton.phi = number_or(s, "phi", root + ".soliton", 0.0);
        c.soliton.mu = number_or(s, "mu", root + ".soliton", 1.0);
        if (!(c.soliton.alpha > 0.0)) fail(root + ".soliton.alpha", "must be positive");
    }
    if (!(c.soliton.mu >= c.mu_min && c.soliton.mu <= c.mu_max))
        fail(root + ".soliton.mu", "must lie in the configured mu_window");
    // Grid resolution of the soliton family at the initial scale.
    {
        const double mu = c.soliton.mu;
        if (mu * c.L <= 8.0 * M_PI) fail(root + ".soliton.mu", "box too short for this scale (need mu L > 8 pi)");
        const double r = std::sqrt(1.0 - 4.0 * M_PI / (mu * c.L));
        if (0.5 * static_cast<double>(c.n) * std::log(r) > -30.0)
            fail(root + ".soliton.mu", "scale not resolved by grid.n points");
    }

    if (j.contains("potential")) {
        const auto& p = j.at("potential");
        const std::string path = root + ".potential";
        if (!p.is_object() || !p.contains("kind")) fail(path, "expected an object with a kind");
        c.potential.kind = text(p.at("kind"), path + ".kind");
        const auto& k = c.potential.kind;
        if (k == "gaussian" || k == "sech2") {
            only_keys(p, path, {"kind", "amplitude", "center", "width"});
            c.potential.amplitude = number_or(p, "amplitude", path, 1.0);
            c.potential.center = number_or(p, "center", path, 0.0);
            c.potential.width = number_or(p, "width", path, 1.0);
            if (!(c.potential.width > 0.0)) fail(path + ".width", "must be positive");
        } else if (k == "constant") {
            only_keys(p, path, {"kind", "value"});
            c.potential.value = number_or(p, "value", path, 0.0);
        } else if (k == "table") {
            only_keys(p, path, {"kind", "x", "b"});
            if (!p.contains("x") || !p.contains("b")) fail(path, "table needs x and b arrays");
            c.potential.xs = numbers(p.at("x"), path + ".x");
            c.potential.bs = numbers(p.at("b"), path + ".b");
            if (c.potential.xs.size() != c.potential.bs.size() || c.potential.xs.size() < 4)
                fail(path, "x and b must have equal length >= 4");
            for (std::size_t i = 1; i < c.potential.xs.size(); ++i)
                if (!(c.potential.xs[i] > c.potential.xs[i - 1])) fail(path + ".x", "must be strictly increasing");
        } else {
            fail(path + ".kind", "expected gaussian, sech2, constant or table");
        }
    }

    if (j.contains("eps")) c.eps = number(j.at("eps"), root + ".eps");
    if (!(c.eps >= 0.0)) fail(root + ".eps", "must be >= 0");
    if (j.contains("delta")) c.delta = number(j.at("delta"), root + ".delta");
    if (!(c.delta > 0.0 && c.delta < 0.5)) fail(root + ".delta", "must lie in (0, 1/2)");

    if (j.contains("t_final")) {
        const auto& t = j.at("t_final");
        const std::string path = root + ".t_final";
        if (t.is_number()) {
            c.horizon.value = number(t, path);
        } else {
            if (!t.is_object() || !t.contains("policy")) fail(path, "expected a number or an object with a policy");
            const std::string policy = text(t.at("policy"), path + ".policy");
            if (policy == "fixed") {
                only_keys(t, path, {"policy", "value"});
                if (!t.contains("value")) fail(path + ".value", "required for the fixed policy");
                c.horizon.value = number(t.at("value"), path + ".value");
            } else if (policy == "theorem_horizon") {
                only_keys(t, path, {"policy", "c0_fit"});
                c.horizon.kind = HorizonPolicy::Kind::TheoremHorizon;
                c.horizon.c0_fit = number_or(t, "c0_fit", path, 32.0);
                if (!(c.horizon.c0_fit > 1.0)) fail(path + ".c0_fit", "must exceed 1");
            } else if (policy == "eps_power") {
                only_keys(t, path, {"policy", "exponent"});
                c.horizon.kind = HorizonPolicy::Kind::EpsPower;
                c.horizon.exponent = number_or(t, "exponent", path, 0.5);
            } else {
                fail(path + ".policy", "expected fixed, theorem_horizon or eps_power");
            }
        }
        if (c.horizon.kind == HorizonPolicy::Kind::Fixed && !(c.horizon.value >= 0.0)) fail(path, "must be >= 0");
    }

    if (j.contains("dt")) c.dt = number(j.at("dt"), root + ".dt");
    if (!(c.dt > 0.0)) fail(root + ".dt", "must be positive");
    if (j.contains("stride")) c.stride = count(j.at("stride"), root + ".stride");
    if (j.contains("out")) c.out = text(j.at("out"), root + ".out");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) fail(root + ".seed", "expected a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("eps_list")) {
        c.eps_list = numbers(j.at("eps_list"), root + ".eps_list");
        for (std::size_t i = 0; i < c.eps_list.size(); ++i)
            if (!(c.eps_list[i] > 0.0)) fail(root + ".eps_list[" + std::to_string(i) + "]", "must be positive");
    }
    if (j.contains("tracking")) {
        const auto& t = j.at("tracking");
        const std::string path = root + ".tracking";
        only_keys(t, path, {"effective_model", "velocity", "newton_tolerance", "tubular_radius"});
        if (t.contains("effective_model")) {
            const auto m = text(t.at("effective_model"), path + ".effective_model");
            if (m == "grid") c.effective_model = EffectiveModel::Grid;
            else if (m == "line") c.effective_model = EffectiveModel::Line;
            else fail(path + ".effective_model", "expected grid or line");
        }
        if (t.contains("velocity")) {
            const auto m = text(t.at("velocity"), path + ".velocity");
            if (m == "implicit") c.velocity = VelocityMethod::Implicit;
            else if (m == "centered") c.velocity = VelocityMethod::Centered;
            else fail(path + ".velocity", "expected implicit or centered");
        }
        c.newton_tolerance = number_or(t, "newton_tolerance", path, c.newton_tolerance);
        c.tubular_radius = number_or(t, "tubular_radius", path, c.tubular_radius);
        if (!(c.newton_tolerance > 0.0)) fail(path + ".newton_tolerance", "must be positive");
        if (!(c.tubular_radius > 0.0)) fail(path + ".tubular_radius", "must be positive");
    }
    if (j.contains("snapshots")) {
        if (!j.at("snapshots").is_boolean()) fail(root + ".snapshots", "expected true or false");
        c.snapshots = j.at("snapshots").get<bool>();
    }
    if (j.contains("parallel")) c.parallel = count(j.at("parallel"), root + ".parallel");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace szego
