#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

#include "szego/config.hpp"
#include "szego/experiments.hpp"
#include "szego/output.hpp"
#include "szego/validation.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cubic Szego soliton lab: PDE runs, modulation tracking, eps sweeps and the acceptance suite"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir;
    bool plots = false;
    std::size_t parallel = 0;

    const char* names[] = {"simulate", "effective", "track", "sweep", "validate"};
    const char* help[] = {"Run the PDE and write pde.csv and conservation.json",
                          "Integrate the effective ODE and write effective.csv",
                          "Run PDE + decomposition + effective ODE; write track.csv and metrics.json",
                          "Run tracked runs over eps_list and fit log-log slopes into summary.json",
                          "Run the acceptance suite and print a pass/fail table"};
    for (int i = 0; i < 5; ++i) {
        auto* sub = app.add_subcommand(names[i], help[i]);
        auto* cfg = sub->add_option("--config", config_path, "JSON experiment config");
        if (std::string(names[i]) != "validate") cfg->required();
        sub->add_option("--out", out_dir, "Output directory (overrides config.out)");
        sub->add_flag("--plots", plots, "Also write SVG plots");
        sub->add_option("--parallel", parallel, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();

    szego::ExperimentConfig config;
    try {
        if (!config_path.empty()) config = szego::load_config(config_path);
    } catch (const szego::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    if (!out_dir.empty()) config.out = out_dir;
    if (parallel > 0) config.parallel = parallel;

    try {
        if (cmd == "simulate") {
            const auto rep = szego::cmd_simulate(config, config.out, plots);
            std::cout << fmt::format("simulate: {} steps, mass drift {:.3e}, H_b drift {:.3e}, momentum drift {:.3e}\n",
                                     rep.steps, rep.mass_drift, rep.hamiltonian_drift, rep.momentum_drift);
        } else if (cmd == "effective") {
            const auto states = szego::cmd_effective(config, config.out, plots);
            const auto& g = states.back().g;
            std::cout << fmt::format("effective: t = {:.6g}, g = ({:.10g}, {:.10g}, {:.10g}, {:.10g})\n",
                                     states.back().t, g.a, g.alpha, g.phi, g.mu);
        } else if (cmd == "track") {
            const auto run = szego::cmd_track(config, config.out, plots);
            const auto& m = run.metrics;
            std::cout << fmt::format(
                "track: eps = {}, t_final = {:.6g}, sup||w|| = {:.4e}, sup|da| = {:.3e}, sup|dalpha| = {:.3e}, "
                "sup|dphi| = {:.3e}, sup|dmu| = {:.3e}\n",
                run.eps, run.t_final, m.sup_w_h12, m.sup_dev[0], m.sup_dev[1], m.sup_dev[2], m.sup_dev[3]);
        } else if (cmd == "sweep") {
            const auto res = szego::cmd_sweep(config, config.out, plots, szego::resolve_workers(config.parallel));
            std::cout << fmt::format("sweep slopes: w {:.3f}, a {:.3f}, alpha {:.3f}, phi {:.3f}, mu {:.3f}\n",
                                     res.slope_w, res.slope_dev[0], res.slope_dev[1], res.slope_dev[2],
                                     res.slope_dev[3]);
        } else {
            const auto results = szego::run_validation(config, &std::cout);
            szego::ensure_directory(config.out);
            szego::write_validation_json(config.out + "/validation.json", config, results);
            std::size_t failed = 0;
            for (const auto& r : results) failed += r.passed ? 0 : 1;
            std::cout << fmt::format("{} of {} checks passed\n", results.size() - failed, results.size());
            return failed == 0 ? kOk : kRuntimeFailure;
        }
    } catch (const szego::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << cmd << " failed: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kOk;
}
