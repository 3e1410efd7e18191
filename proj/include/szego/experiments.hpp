#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "szego/config.hpp"
#include "szego/decomposition.hpp"
#include "szego/dynamics.hpp"

namespace szego {

struct TrackRun {
    double eps = 0.0;
    double t_final = 0.0;
    TrackReport report;  // deviations against the configured comparator
    TheoremMetrics metrics;
    TheoremMetrics metrics_line;  // same run against the line ODE
    std::vector<EffectiveState> effective;
    ConservationReport conservation;
    double seconds = 0.0;
};

// PDE run, decomposition of every sample and the effective run on the same time grid. No files.
TrackRun track_run(const ExperimentConfig& c, double eps);

ConservationReport cmd_simulate(const ExperimentConfig& c, const std::string& out_dir, bool plots);
std::vector<EffectiveState> cmd_effective(const ExperimentConfig& c, const std::string& out_dir, bool plots);
TrackRun cmd_track(const ExperimentConfig& c, const std::string& out_dir, bool plots);

struct SweepResult {
    std::vector<TrackRun> runs;  // in eps_list order
    // Log-log slopes against eps for sup||w||_H1/2, |a - abar|, |alpha - alphabar|, |phi - phibar|, |mu - mubar|.
    double slope_w = 0.0;
    std::array<double, 4> slope_dev{0.0, 0.0, 0.0, 0.0};
    std::array<double, 4> slope_dev_line{0.0, 0.0, 0.0, 0.0};
};

// Runs the members on a bounded pool of `workers` threads. A failing member aborts the sweep
// after the other members finish; `on_partial` sees the completed runs before the error propagates.
SweepResult sweep_runs(const ExperimentConfig& c, const std::vector<double>& eps_list, std::size_t workers,
                       const std::function<void(const std::vector<TrackRun>&, const std::string&)>& on_partial = {});
SweepResult cmd_sweep(const ExperimentConfig& c, const std::string& out_dir, bool plots, std::size_t workers);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Configured parallelism, overridden by SZEGO_LAB_THREADS when set to a positive integer.
std::size_t resolve_workers(std::size_t configured);

void write_track_files(const TrackRun& run, const std::string& dir, bool plots);

}  // namespace szego
