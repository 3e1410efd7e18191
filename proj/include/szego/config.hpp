#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "szego/decomposition.hpp"
#include "szego/potential.hpp"
#include "szego/soliton_manifold.hpp"

namespace szego {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HorizonPolicy {
    enum class Kind { Fixed, TheoremHorizon, EpsPower } kind = Kind::Fixed;
    double value = 10.0;     // fixed
    double c0_fit = 32.0;    // theorem_horizon
    double exponent = 0.5;   // eps_power: t = eps^(-exponent)
};

struct PotentialConfig {
    std::string kind = "gaussian";
    double amplitude = 1.0;
    double center = 0.0;
    double width = 1.0;
    double value = 0.0;
    std::vector<double> xs, bs;

    PotentialSpec build() const;
};

struct ExperimentConfig {
    std::size_t n = 8192;
    double L = 256.0;
    GroupElement soliton = identity();
    PotentialConfig potential;
    double eps = 0.01;
    double delta = 0.35;
    HorizonPolicy horizon;
    double dt = 1e-3;
    std::size_t stride = 100;
    std::string out = "out";
    std::uint64_t seed = 1;
    std::vector<double> eps_list;
    EffectiveModel effective_model = EffectiveModel::Grid;
    VelocityMethod velocity = VelocityMethod::Implicit;
    double newton_tolerance = 1e-13;
    double tubular_radius = 0.25;
    double mu_min = 0.5;
    double mu_max = 2.0;
    bool snapshots = false;
    std::size_t parallel = 1;

    double t_final(double eps_value) const;
    TrackOptions track_options() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

}  // namespace szego
