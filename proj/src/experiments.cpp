#include "szego/experiments.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <thread>

#include "szego/operators.hpp"
#include "szego/output.hpp"

namespace szego {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt_label(const std::string& prefix, double v) { return fmt::format("{}{}", prefix, v); }

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

json conservation_json(const ConservationReport& r) {
    return {{"mass_drift", r.mass_drift},
            {"hamiltonian_drift", r.hamiltonian_drift},
            {"momentum_drift", r.momentum_drift},
            {"steps", r.steps},
            {"dt", r.dt}};
}

json deviations_json(const std::array<double, 4>& d) {
    return {{"a", d[0]}, {"alpha", d[1]}, {"phi", d[2]}, {"mu", d[3]}};
}

json metrics_json(const TrackRun& run, double delta) {
    const auto& m = run.metrics;
    double mass_id = 0.0;
    for (double e : run.report.mass_identity_error) mass_id = std::max(mass_id, e);
    return {{"eps", run.eps},
            {"delta", delta},
            {"t_final", run.t_final},
            {"samples", run.report.times.size()},
            {"sup_w_h12", m.sup_w_h12},
            {"sup_deviation", deviations_json(m.sup_dev)},
            {"sup_deviation_line_ode", deviations_json(run.metrics_line.sup_dev)},
            {"predicted_exponent", {{"w", m.exp_w}, {"a", m.exp_a}, {"phi", m.exp_phi}, {"mu", m.exp_mu}}},
            {"alpha2mu_drift", m.alpha2mu_drift},
            {"x_fit", m.x_fit},
            {"x_fit_line_ode", std::isfinite(m.x_fit_line) ? json(m.x_fit_line) : json("inf")},
            {"max_newton_iterations", m.max_newton_iters},
            {"max_mass_identity_error", mass_id},
            {"left_mu_window", m.left_mu_window},
            {"conservation", conservation_json(run.conservation)},
            {"seconds", run.seconds}};
}

PlotSeries series(const std::string& label, const std::vector<double>& x, const std::vector<double>& y) {
    return {label, x, y};
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope needs two or more points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::size_t resolve_workers(std::size_t configured) {
    if (const char* env = std::getenv("SZEGO_LAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(1, configured);
}

TrackRun track_run(const ExperimentConfig& c, double eps) {
    const auto t0 = Clock::now();
    TrackRun run;
    run.eps = eps;
    run.t_final = c.t_final(eps);
    const auto grid = SpectralGrid::make(c.n, c.L);
    const PotentialSpec b = c.potential.build();
    const HardyField u0 = soliton_profile(grid, c.soliton);
    Tracker tracker(grid, b, eps, c.soliton, mass(u0), c.track_options());
    run.conservation = evolve_pde(u0, b, eps, run.t_final, c.dt, c.stride,
                                  [&](double t, const HardyField& u) { tracker.push(t, u); });
    const std::vector<double> times = tracker.finish().times;

    EffectiveOptions grid_opts;
    grid_opts.model = EffectiveModel::Grid;
    grid_opts.grid = grid;
    EffectiveOptions line_opts;
    line_opts.model = EffectiveModel::Line;
    auto eff_grid = evolve_effective({0.0, c.soliton}, b, eps, times, grid_opts);
    auto eff_line = evolve_effective({0.0, c.soliton}, b, eps, times, line_opts);
    const bool grid_primary = c.effective_model == EffectiveModel::Grid;

    Tracker other = tracker;
    other.compare(grid_primary ? eff_line : eff_grid);
    tracker.compare(grid_primary ? eff_grid : eff_line);
    run.report = tracker.finish();
    run.metrics = theorem_metrics(run.report, eps, c.delta);
    const TrackReport other_report = other.finish();
    const TheoremMetrics other_metrics = theorem_metrics(other_report, eps, c.delta);
    run.metrics_line = grid_primary ? other_metrics : run.metrics;
    run.effective = grid_primary ? std::move(eff_grid) : std::move(eff_line);
    run.seconds = since(t0);
    return run;
}

ConservationReport cmd_simulate(const ExperimentConfig& c, const std::string& out_dir, bool plots) {
    ensure_directory(out_dir);
    const auto grid = SpectralGrid::make(c.n, c.L);
    const PotentialSpec b = c.potential.build();
    const rvec bs = b.samples(*grid);
    const HardyField u0 = soliton_profile(grid, c.soliton);
    CsvWriter csv(out_dir + "/pde.csv", {"t", "norm_L2", "norm_H12", "mass", "hamiltonian"});
    std::unique_ptr<CsvWriter> snaps;
    if (c.snapshots) {
        std::vector<std::string> header{"t"};
        for (std::size_t j = 0; j < c.n; ++j) {
            header.push_back("re" + std::to_string(j));
            header.push_back("im" + std::to_string(j));
        }
        snaps = std::make_unique<CsvWriter>(out_dir + "/snapshots.csv", header);
    }
    std::vector<double> ts, masses, hams;
    const ConservationReport rep = evolve_pde(u0, b, c.eps, c.t_final(c.eps), c.dt, c.stride, [&](double t, const HardyField& u) {
        const double m = mass(u), h = hamiltonian(u, bs, c.eps);
        csv.row({t, l2_norm(u), sobolev_norm(u, 0.5), m, h});
        ts.push_back(t);
        masses.push_back(m);
        hams.push_back(h);
        if (snaps) {
            std::vector<double> row{t};
            row.reserve(2 * c.n + 1);
            for (const auto& v : u.values()) {
                row.push_back(v.real());
                row.push_back(v.imag());
            }
            snaps->row(row);
        }
    });
    json j = conservation_json(rep);
    j["eps"] = c.eps;
    j["t_final"] = c.t_final(c.eps);
    write_json(out_dir + "/conservation.json", j);
    if (plots && !ts.empty()) {
        std::vector<double> dm, dh;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            dm.push_back(std::abs(masses[i] - masses[0]) / masses[0]);
            dh.push_back(std::abs(hams[i] - hams[0]) / std::abs(hams[0]));
        }
        write_svg_plot(out_dir + "/conservation.svg", "Relative drift of conserved quantities", "t", "relative drift",
                       {series("mass", ts, dm), series("H_b", ts, dh)}, true);
    }
    return rep;
}

std::vector<EffectiveState> cmd_effective(const ExperimentConfig& c, const std::string& out_dir, bool plots) {
    ensure_directory(out_dir);
    const PotentialSpec b = c.potential.build();
    EffectiveOptions opts;
    opts.model = c.effective_model;
    if (opts.model == EffectiveModel::Grid) opts.grid = SpectralGrid::make(c.n, c.L);
    const auto times = uniform_times(c.t_final(c.eps), c.dt * static_cast<double>(c.stride));
    const auto states = evolve_effective({0.0, c.soliton}, b, c.eps, times, opts);
    CsvWriter csv(out_dir + "/effective.csv", {"t", "a", "alpha", "phi", "mu"});
    std::vector<double> ts, as, mus;
    for (const auto& s : states) {
        csv.row({s.t, s.g.a, s.g.alpha, s.g.phi, s.g.mu});
        ts.push_back(s.t);
        as.push_back(s.g.a);
        mus.push_back(s.g.mu);
    }
    if (plots)
        write_svg_plot(out_dir + "/effective.svg", "Effective parameters", "t", "value",
                       {series("a", ts, as), series("mu", ts, mus)}, false);
    return states;
}

void write_track_files(const TrackRun& run, const std::string& dir, bool plots) {
    ensure_directory(dir);
    const auto& r = run.report;
    CsvWriter csv(dir + "/track.csv",
                  {"t", "a", "alpha", "phi", "mu", "w_h12", "x_norm", "da", "dalpha", "dphi", "dmu"});
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        const auto& g = r.g_series[i];
        const std::array<double, 4> d = r.has_effective ? r.deviations[i] : std::array<double, 4>{0.0, 0.0, 0.0, 0.0};
        csv.row({r.times[i], g.a, g.alpha, g.phi, g.mu, r.w_h12[i], r.x_norm[i], d[0], d[1], d[2], d[3]});
    }
    CsvWriter eff(dir + "/effective.csv", {"t", "a", "alpha", "phi", "mu"});
    for (const auto& s : run.effective) eff.row({s.t, s.g.a, s.g.alpha, s.g.phi, s.g.mu});
    write_json(dir + "/metrics.json", metrics_json(run, run.metrics.delta));
    if (plots) {
        write_svg_plot(dir + "/w_norm.svg", fmt_label("||w||_H1/2, eps = ", run.eps), "t", "||w||_H1/2",
                       {series("||w||_H1/2", r.times, r.w_h12)}, true);
        std::vector<PlotSeries> devs;
        const char* names[] = {"|a - abar|", "|alpha - alphabar|", "|phi - phibar|", "|mu - mubar|"};
        for (int p = 0; p < 4; ++p) {
            std::vector<double> y;
            for (const auto& d : r.deviations) y.push_back(d[p]);
            devs.push_back(series(names[p], r.times, y));
        }
        write_svg_plot(dir + "/deviations.svg", fmt_label("Parameter deviations, eps = ", run.eps), "t", "deviation",
                       devs, true);
    }
}

TrackRun cmd_track(const ExperimentConfig& c, const std::string& out_dir, bool plots) {
    TrackRun run = track_run(c, c.eps);
    write_track_files(run, out_dir, plots);
    return run;
}

SweepResult sweep_runs(const ExperimentConfig& c, const std::vector<double>& eps_list, std::size_t workers,
                       const std::function<void(const std::vector<TrackRun>&, const std::string&)>& on_partial) {
    const std::size_t m = eps_list.size();
    std::vector<TrackRun> runs(m);
    std::vector<char> done(m, 0);
    std::vector<std::string> errors(m);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < m; i = next++) {
            try {
                runs[i] = track_run(c, eps_list[i]);
                done[i] = 1;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const std::size_t nthreads = std::min(std::max<std::size_t>(1, workers), std::max<std::size_t>(1, m));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::string failure;
    for (std::size_t i = 0; i < m; ++i)
        if (!done[i]) failure += fmt_label("eps = ", eps_list[i]) + ": " + errors[i] + "; ";
    if (!failure.empty()) {
        std::vector<TrackRun> partial;
        for (std::size_t i = 0; i < m; ++i)
            if (done[i]) partial.push_back(runs[i]);
        if (on_partial) on_partial(partial, failure);
        throw std::runtime_error("sweep aborted: " + failure);
    }

    SweepResult out;
    out.runs = std::move(runs);
    if (m >= 2) {
        std::vector<double> w;
        std::array<std::vector<double>, 4> dev, dev_line;
        for (const auto& r : out.runs) {
            w.push_back(r.metrics.sup_w_h12);
            for (int p = 0; p < 4; ++p) {
                dev[p].push_back(r.metrics.sup_dev[p]);
                dev_line[p].push_back(r.metrics_line.sup_dev[p]);
            }
        }
        out.slope_w = loglog_slope(eps_list, w);
        for (int p = 0; p < 4; ++p) {
            out.slope_dev[p] = loglog_slope(eps_list, dev[p]);
            out.slope_dev_line[p] = loglog_slope(eps_list, dev_line[p]);
        }
    }
    return out;
}

SweepResult cmd_sweep(const ExperimentConfig& c, const std::string& out_dir, bool plots, std::size_t workers) {
    const auto& list = c.eps_list;
    if (list.size() < 3) throw ConfigError("config.eps_list: a sweep needs at least 3 eps values");
    const double ratio = list[1] / list[0];
    for (std::size_t i = 1; i < list.size(); ++i)
        if (std::abs(list[i] / list[i - 1] / ratio - 1.0) > 1e-6 || ratio == 1.0)
            throw ConfigError("config.eps_list: values must be geometrically spaced");
    ensure_directory(out_dir);

    auto member_dir = [&](double e) { return out_dir + "/" + fmt_label("eps_", e); };
    auto summary_for = [&](const std::vector<TrackRun>& runs) {
        json members = json::array();
        for (const auto& r : runs) members.push_back(metrics_json(r, c.delta));
        return json{{"delta", c.delta}, {"eps_list", list}, {"members", members}};
    };
    SweepResult res = sweep_runs(c, list, workers, [&](const std::vector<TrackRun>& partial, const std::string& why) {
            for (const auto& r : partial) write_track_files(r, member_dir(r.eps), plots);
            json s = summary_for(partial);
            s["status"] = "aborted";
            s["error"] = why;
            write_json(out_dir + "/summary.json", s);
        });
    for (const auto& r : res.runs) write_track_files(r, member_dir(r.eps), plots);

    json s = summary_for(res.runs);
    s["status"] = "complete";
    const auto& m0 = res.runs.front().metrics;
    s["slopes"] = {{"sup_w_h12", res.slope_w},
                   {"a", res.slope_dev[0]},
                   {"alpha", res.slope_dev[1]},
                   {"phi", res.slope_dev[2]},
                   {"mu", res.slope_dev[3]}};
    s["slopes_line_ode"] = {{"a", res.slope_dev_line[0]},
                            {"alpha", res.slope_dev_line[1]},
                            {"phi", res.slope_dev_line[2]},
                            {"mu", res.slope_dev_line[3]}};
    s["predicted_exponents"] = {{"sup_w_h12", m0.exp_w}, {"a", m0.exp_a}, {"phi", m0.exp_phi}, {"mu", m0.exp_mu}};
    write_json(out_dir + "/summary.json", s);

    if (plots) {
        std::vector<double> w, da, dphi, dmu;
        for (const auto& r : res.runs) {
            w.push_back(r.metrics.sup_w_h12);
            da.push_back(r.metrics.sup_dev[0]);
            dphi.push_back(r.metrics.sup_dev[2]);
            dmu.push_back(r.metrics.sup_dev[3]);
        }
        std::vector<double> loge;
        for (double e : list) loge.push_back(std::log10(e));
        write_svg_plot(out_dir + "/sweep.svg", "Sweep suprema against log10(eps)", "log10(eps)", "sup",
                       {series("sup ||w||", loge, w), series("sup |a - abar|", loge, da),
                        series("sup |phi - phibar|", loge, dphi), series("sup |mu - mubar|", loge, dmu)},
                       true);
    }
    return res;
}

}  // namespace szego
