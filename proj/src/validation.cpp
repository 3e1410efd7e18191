#include "szego/validation.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <random>

#include "szego/decomposition.hpp"
#include "szego/experiments.hpp"
#include "szego/operators.hpp"

namespace szego {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Measurement below(std::string label, double value, double limit) {
    return {std::move(label), value, limit, true, value < limit};
}

Measurement at_least(std::string label, double value, double limit) {
    return {std::move(label), value, limit, false, value >= limit};
}

// Shared inputs of the acceptance runs.
struct Suite {
    const ExperimentConfig& base;
    std::ostream* log;
    GridPtr grid;
    PotentialSpec gauss = PotentialSpec::gaussian(1.0, 0.0, 1.0);
    std::optional<ConservationReport> unperturbed;
    double unperturbed_error = 0.0;
    std::optional<SweepResult> sweep;
    std::string sweep_error;
    double sweep_seconds = 0.0;

    Suite(const ExperimentConfig& c, std::ostream* l) : base(c), log(l), grid(SpectralGrid::make(c.n, c.L)) {}

    static constexpr double sweep_eps[4] = {4e-2, 2e-2, 1e-2, 5e-3};

    ExperimentConfig sweep_config() const {
        ExperimentConfig c = base;
        c.soliton = identity();
        c.potential = PotentialConfig{};
        c.delta = 0.35;
        c.horizon.kind = HorizonPolicy::Kind::EpsPower;
        c.horizon.exponent = 0.5;
        c.dt = 1e-3;
        c.stride = 100;
        return c;
    }

    const SweepResult& sweep_result() {
        if (sweep) return *sweep;
        if (!sweep_error.empty()) throw std::runtime_error(sweep_error);
        const auto t0 = Clock::now();
        try {
            const std::vector<double> list(std::begin(sweep_eps), std::end(sweep_eps));
            if (log) *log << "  running eps sweep {4e-2, 2e-2, 1e-2, 5e-3} ..." << std::endl;
            sweep = sweep_runs(sweep_config(), list, resolve_workers(base.parallel));
        } catch (const std::exception& e) {
            sweep_error = e.what();
            sweep_seconds = since(t0);
            throw;
        }
        sweep_seconds = since(t0);
        return *sweep;
    }

    const TrackRun& run_at(double eps) {
        const auto& s = sweep_result();
        for (const auto& r : s.runs)
            if (r.eps == eps) return r;
        throw std::logic_error("eps not in sweep");
    }

    // epsilon = 0 soliton run to t = 10 at dt; returns the L2 error against the exact traveling wave.
    double soliton_error(double dt, ConservationReport* rep) const {
        const GroupElement g0 = identity();
        const HardyField u0 = soliton_profile(grid, g0);
        const double T = 10.0;
        HardyField last = u0;
        const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
        const ConservationReport r = evolve_pde(u0, gauss, 0.0, T, dt, std::max<std::size_t>(1, steps / 10),
                                                [&](double, const HardyField& u) { last = u; });
        if (rep) *rep = r;
        // The family translates at a' = alpha^2 mu / 2 and rotates at phi' = -alpha^2 mu^2 / 4.
        const GroupElement gt{g0.a + g0.alpha * g0.alpha * g0.mu * T / 2.0, g0.alpha,
                              g0.phi - g0.alpha * g0.alpha * g0.mu * g0.mu * T / 4.0, g0.mu};
        return l2_norm(last - soliton_profile(grid, gt));
    }
};

CheckResult check_symplectic_table(Suite& s) {
    CheckResult r{1, "Symplectic table", false, {}, 0.0, {}};
    const auto t0 = Clock::now();
    const Mat4 m = omega_eta_matrix(*s.grid);
    const double expected[6] = {-M_PI / 2.0, 0.0, -M_PI / 2.0, -M_PI, 0.0, M_PI / 2.0};
    const int idx[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    double err = 0.0;
    for (int k = 0; k < 6; ++k) err = std::max(err, std::abs(m(idx[k][0], idx[k][1]) - expected[k]));
    const double seconds = since(t0);
    r.parts.push_back(below("max entry error", err, std::max(1e-8, 10.0 / s.grid->box_length())));
    r.parts.push_back(below("runtime [s]", seconds, 1.0));
    return r;
}

CheckResult check_soliton_flow(Suite& s) {
    CheckResult r{2, "Exact soliton flow", false, {}, 0.0, {}};
    const auto t0 = Clock::now();
    ConservationReport rep;
    const double err = s.soliton_error(1e-3, &rep);
    s.unperturbed = rep;
    s.unperturbed_error = err;
    r.parts.push_back(below("L2 error at t = 10, dt = 1e-3", err, 1e-6));
    // Convergence order at step sizes where the time error dominates roundoff.
    std::vector<double> dts{0.08, 0.04, 0.02}, errs;
    for (double dt : dts) errs.push_back(s.soliton_error(dt, nullptr));
    const double slope = loglog_slope(dts, errs);
    r.parts.push_back(below("|RK4 order - 4| under dt halving", std::abs(slope - 4.0), 0.3));
    r.parts.push_back(below("runtime [s]", since(t0), 60.0));
    return r;
}

CheckResult check_conservation(Suite& s) {
    CheckResult r{3, "Conservation", false, {}, 0.0, {}};
    const HardyField u0 = eta(s.grid);
    const ConservationReport pert = evolve_pde(u0, s.gauss, 1e-2, 10.0, 1e-3, 100, {});
    if (!s.unperturbed) {
        ConservationReport rep;
        s.soliton_error(1e-3, &rep);
        s.unperturbed = rep;
    }
    r.parts.push_back(below("perturbed mass drift", pert.mass_drift, 1e-8));
    r.parts.push_back(below("perturbed H_b drift", pert.hamiltonian_drift, 1e-7));
    r.parts.push_back(below("unperturbed momentum drift", s.unperturbed->momentum_drift, 1e-7));
    r.parts.push_back(at_least("perturbed momentum drift", pert.momentum_drift, 1e-5));
    return r;
}

CheckResult check_coercivity(Suite& s) {
    CheckResult r{4, "Coercivity sampling", false, {}, 0.0, {}};
    const auto t0 = Clock::now();
    std::mt19937_64 rng(s.base.seed);
    double worst = std::numeric_limits<double>::infinity();
    double orth = 0.0;
    const auto frame = SolitonFamily(s.grid).frame(identity());
    for (int i = 0; i < 50; ++i) {
        const HardyField h = random_hardy_field(s.grid, rng, 1.0);
        const HardyField w = h - lie_apply_eta(manifold_project(h), s.grid);
        const double nw = sobolev_norm(w, 0.5);
        for (const auto& f : frame) orth = std::max(orth, std::abs(symplectic_pair(w, f)) / nw);
        worst = std::min(worst, inner_real(linearized_apply(w), w) / (nw * nw));
    }
    r.parts.push_back(at_least("min <Lw,w> / ||w||^2_H1/2", worst, 0.24));
    r.parts.push_back(below("max |omega(w, e_j eta)| / ||w||", orth, 1e-10));
    r.parts.push_back(below("runtime [s]", since(t0), 10.0));
    return r;
}

CheckResult check_kernel_kronecker(Suite& s) {
    CheckResult r{5, "Kernel and Kronecker", false, {}, 0.0, {}};
    const HardyField e = eta(s.grid);
    cvec sq(s.grid->size());
    for (std::size_t j = 0; j < sq.size(); ++j) sq[j] = e.values()[j] * e.values()[j];
    const HardyField e2 = szego_project(s.grid, sq);
    std::mt19937_64 rng(s.base.seed + 1);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const HardyField h = random_hardy_field(s.grid, rng, 1.0);
        worst = std::max(worst, l2_norm(hankel_apply(e2, kernel_witness(h))) / l2_norm(h));
    }
    r.parts.push_back(below("max ||H_eta2 k(h)|| / ||h||", worst, 1e-6));
    const std::size_t m = std::min<std::size_t>(256, s.grid->size() / 2);
    const double r1 = static_cast<double>(hankel_rank(e, 1e-8, m).rank_estimate);
    const double r2 = static_cast<double>(hankel_rank(e2, 1e-8, m).rank_estimate);
    r.parts.push_back(below("|rank H_eta - 1|", std::abs(r1 - 1.0), 0.5));
    r.parts.push_back(below("|rank H_eta2 - 2|", std::abs(r2 - 2.0), 0.5));
    return r;
}

CheckResult check_decomposition(Suite& s) {
    CheckResult r{6, "Decomposition exactness", false, {}, 0.0, {}};
    std::mt19937_64 rng(s.base.seed + 2);
    std::uniform_real_distribution<double> ua(-10.0, 10.0), ual(0.5, 2.0), uph(0.0, 2.0 * M_PI),
        umu(s.base.mu_min, s.base.mu_max), jitter(-1.0, 1.0);
    ReparametrizeOptions opts;
    opts.tolerance = 1e-13;
    const Reparametrizer rep(s.grid, opts);
    double err = 0.0;
    int iters = 0;
    for (int i = 0; i < 100; ++i) {
        const GroupElement g{ua(rng), ual(rng), uph(rng), umu(rng)};
        const GroupElement guess{g.a + 0.01 * jitter(rng) / g.mu, g.alpha * (1.0 + 0.01 * jitter(rng)),
                                 g.phi + 0.01 * jitter(rng), g.mu * (1.0 + 0.01 * jitter(rng))};
        const Decomposition d = rep(soliton_profile(s.grid, g), guess);
        const auto x = d.g.as_array(), y = g.as_array();
        for (int p = 0; p < 4; ++p) err = std::max(err, std::abs(x[p] - y[p]));
        iters = std::max(iters, d.newton_iters);
    }
    r.parts.push_back(below("max parameter error", err, 1e-9));
    r.parts.push_back(below("max Newton iterations", iters, 5.5));
    const auto& run = s.run_at(1e-2);
    double mass_id = 0.0;
    for (double v : run.report.mass_identity_error) mass_id = std::max(mass_id, v);
    r.parts.push_back(below("mass identity relative error (eps = 1e-2 run)", mass_id, 1e-6));
    return r;
}

CheckResult check_effective_fixed_point(Suite& s) {
    CheckResult r{7, "Effective-flow fixed point", false, {}, 0.0, {}};
    std::mt19937_64 rng(s.base.seed + 3);
    std::uniform_real_distribution<double> ua(-10.0, 10.0), ual(0.5, 2.0), uph(0.0, 2.0 * M_PI),
        umu(s.base.mu_min, s.base.mu_max), ueps(0.0, 0.05);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const GroupElement g{ua(rng), ual(rng), uph(rng), umu(rng)};
        const CoefficientTriple abc = abc_coefficients(g, s.gauss, ueps(rng));
        worst = std::max(worst, x_vector(g, effective_rhs(g, abc), abc).norm());
    }
    r.parts.push_back(below("max ||X(effective_rhs)||", worst, 1e-9));
    double drift = 0.0;
    for (int i = 0; i < 5; ++i) {
        const GroupElement g{ua(rng) / 5.0, ual(rng), uph(rng), umu(rng)};
        const auto states = evolve_effective({0.0, g}, s.gauss, 0.02, uniform_times(20.0, 0.5));
        const double q0 = g.alpha * g.alpha * g.mu;
        for (const auto& st : states)
            drift = std::max(drift, std::abs(st.g.alpha * st.g.alpha * st.g.mu - q0) / q0);
    }
    r.parts.push_back(below("alpha^2 mu relative drift", drift, 1e-9));
    return r;
}

CheckResult check_scaling(Suite& s) {
    CheckResult r{8, "Theorem-scaling regression", false, {}, 0.0, {}};
    const std::vector<double> eps{4e-2, 2e-2, 1e-2};
    std::vector<double> w;
    std::array<std::vector<double>, 4> dev;
    for (double e : eps) {
        const auto& run = s.run_at(e);
        w.push_back(run.metrics.sup_w_h12);
        for (int p = 0; p < 4; ++p) dev[p].push_back(run.metrics.sup_dev[p]);
    }
    r.parts.push_back(at_least("slope sup||w||_H1/2", loglog_slope(eps, w), 0.5));
    r.parts.push_back(at_least("slope sup|mu - mubar|", loglog_slope(eps, dev[3]), 0.9));
    r.parts.push_back(at_least("slope sup|a - abar|", loglog_slope(eps, dev[0]), 0.9));
    r.parts.push_back(at_least("slope sup|phi - phibar|", loglog_slope(eps, dev[2]), 0.6));
    r.parts.push_back(below("sweep runtime [s]", s.sweep_seconds, 1800.0));
    return r;
}

CheckResult check_x_bound(Suite& s) {
    CheckResult r{9, "X-bound regression", false, {}, 0.0, {}};
    const double c1 = s.run_at(1e-2).metrics.x_fit;
    const double c2 = s.run_at(5e-3).metrics.x_fit;
    r.parts.push_back(below("c_fit at eps = 1e-2", c1, std::numeric_limits<double>::infinity()));
    const double ratio = c2 / c1;
    r.parts.push_back(below("c_fit change under eps halving (factor)", std::max(ratio, 1.0 / ratio), 2.0));
    return r;
}

}  // namespace

std::vector<CheckResult> run_validation(const ExperimentConfig& c, std::ostream* log) {
    Suite s(c, log);
    const std::vector<std::function<CheckResult(Suite&)>> checks{
        check_symplectic_table, check_soliton_flow,    check_conservation,
        check_coercivity,       check_kernel_kronecker, check_decomposition,
        check_effective_fixed_point, check_scaling,    check_x_bound};
    const char* names[] = {"Symplectic table",        "Exact soliton flow",         "Conservation",
                           "Coercivity sampling",     "Kernel and Kronecker",       "Decomposition exactness",
                           "Effective-flow fixed point", "Theorem-scaling regression", "X-bound regression"};
    std::vector<CheckResult> out;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto t0 = Clock::now();
        CheckResult r;
        try {
            r = checks[i](s);
            r.passed = !r.parts.empty();
            for (const auto& p : r.parts) r.passed = r.passed && p.passed;
        } catch (const std::exception& e) {
            r = CheckResult{static_cast<int>(i + 1), names[i], false, {}, 0.0, e.what()};
        }
        r.seconds = since(t0);
        if (log) *log << format_check(r) << std::endl;
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_check(const CheckResult& r) {
    std::string line = fmt::format("[{}] {} {}", r.passed ? "PASS" : "FAIL", r.id, r.name);
    if (!r.error.empty()) line += ": error: " + r.error;
    for (std::size_t i = 0; i < r.parts.size(); ++i) {
        const auto& p = r.parts[i];
        line += fmt::format("{} {} = {:.4g} {} {:.4g}{}", i == 0 ? ":" : ";", p.label, p.value,
                            p.upper ? "<" : ">=", p.limit, p.passed ? "" : " (violated)");
    }
    line += fmt::format(" ({:.1f} s)", r.seconds);
    return line;
}

void write_validation_json(const std::string& path, const ExperimentConfig& c, const std::vector<CheckResult>& results) {
    using nlohmann::json;
    json checks = json::array();
    bool all = true;
    for (const auto& r : results) {
        json parts = json::array();
        for (const auto& p : r.parts) {
            const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(v > 0 ? "inf" : "nan"); };
            parts.push_back({{"label", p.label},
                             {"value", num(p.value)},
                             {"limit", num(p.limit)},
                             {"comparison", p.upper ? "<" : ">="},
                             {"passed", p.passed}});
        }
        checks.push_back({{"id", r.id},
                          {"name", r.name},
                          {"passed", r.passed},
                          {"seconds", r.seconds},
                          {"error", r.error},
                          {"measurements", parts}});
        all = all && r.passed;
    }
    const json j{{"grid", {{"n", c.n}, {"L", c.L}}}, {"seed", c.seed}, {"all_passed", all}, {"checks", checks}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace szego
