#include "szego/dynamics.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "szego/decomposition.hpp"
#include "szego/operators.hpp"

namespace szego {

namespace {

// Trapezoid on [lo, hi] refined by doubling until successive values agree.
template <class F>
double refined_trapezoid(F&& f, double lo, double hi) {
    std::size_t m = 256;
    double h = (hi - lo) / static_cast<double>(m);
    double sum = 0.5 * (f(lo) + f(hi));
    for (std::size_t i = 1; i < m; ++i) sum += f(lo + h * static_cast<double>(i));
    double value = sum * h;
    for (int level = 0; level < 14; ++level) {
        double mid = 0.0;
        for (std::size_t i = 0; i < m; ++i) mid += f(lo + h * (static_cast<double>(i) + 0.5));
        sum += mid;
        m *= 2;
        h *= 0.5;
        const double next = sum * h;
        const double change = std::abs(next - value);
        value = next;
        if (level >= 2 && change <= 1e-14 * std::max(1.0, std::abs(value))) break;
    }
    return value;
}

}  // namespace

CoefficientTriple abc_coefficients(const GroupElement& g, const PotentialSpec& b, double eps) {
    CoefficientTriple out;
    if (eps == 0.0) return out;
    const double a = g.a, mu = g.mu;
    const double k = eps / M_PI;
    if (!b.has_support()) {
        // Constant b: only the total mass of |eta|^2 enters.
        out.A = k * b.far_left() * M_PI;
        return out;
    }
    const auto [y0, y1] = b.window();
    const double x0 = mu * (y0 - a), x1 = mu * (y1 - a);
    // Substitution y = a + x / mu; the window carries all of b', the tails of A are arctangents.
    const double tails = b.far_left() * (std::atan(x0) + 0.5 * M_PI) + b.far_right() * (0.5 * M_PI - std::atan(x1));
    const double a_in = refined_trapezoid(
        [&](double y) {
            const double s = mu * (y - a);
            return mu * b.eval_b(y) / (1.0 + s * s);
        },
        y0, y1);
    const double b_in = refined_trapezoid(
        [&](double y) {
            const double s = mu * (y - a);
            return b.eval_db(y) * s / (1.0 + s * s);
        },
        y0, y1);
    const double c_in = refined_trapezoid(
        [&](double y) {
            const double s = mu * (y - a);
            return b.eval_db(y) / (1.0 + s * s);
        },
        y0, y1);
    out.A = k * (tails + a_in);
    out.B = k * b_in;
    out.C = k * c_in;
    return out;
}

HardyField pde_rhs(const HardyField& u, const rvec& b, double eps) {
    const auto& grid = u.grid();
    if (b.size() != grid->size()) throw DimensionError("potential samples do not match grid");
    cvec f(u.values());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] *= std::norm(f[j]) + eps * b[j];
    return szego_project(grid, f) * cplx(0.0, -1.0);
}

HardyField pde_rhs(const HardyField& u, const PotentialSpec& b, double eps) {
    return pde_rhs(u, b.samples(*u.grid()), eps);
}

namespace {

class SpectralRk4 {
public:
    SpectralRk4(GridPtr grid, rvec b, double eps)
        : grid_(std::move(grid)), b_(std::move(b)), eps_(eps), n_(grid_->size()), half_(n_ / 2), phys_(n_),
          spec_(n_) {}

    // out = -i Pi((|u|^2 + eps b) u) on the kept modes; u given by its kept modes.
    void rhs(const cvec& u, cvec& out) {
        std::fill(spec_.begin() + static_cast<long>(half_), spec_.end(), cplx(0.0));
        std::copy(u.begin(), u.begin() + static_cast<long>(half_), spec_.begin());
        grid_->backward(spec_.data(), phys_.data());
        for (std::size_t j = 0; j < n_; ++j) phys_[j] *= std::norm(phys_[j]) + eps_ * b_[j];
        grid_->forward(phys_.data(), spec_.data());
        for (std::size_t k = 0; k < half_; ++k) out[k] = cplx(spec_[k].imag(), -spec_[k].real());
    }

    void step(cvec& u, double dt) {
        k1_.resize(half_);
        k2_.resize(half_);
        k3_.resize(half_);
        k4_.resize(half_);
        tmp_.resize(half_);
        rhs(u, k1_);
        for (std::size_t k = 0; k < half_; ++k) tmp_[k] = u[k] + 0.5 * dt * k1_[k];
        rhs(tmp_, k2_);
        for (std::size_t k = 0; k < half_; ++k) tmp_[k] = u[k] + 0.5 * dt * k2_[k];
        rhs(tmp_, k3_);
        for (std::size_t k = 0; k < half_; ++k) tmp_[k] = u[k] + dt * k3_[k];
        rhs(tmp_, k4_);
        const double w = dt / 6.0;
        for (std::size_t k = 0; k < half_; ++k) u[k] += w * (k1_[k] + 2.0 * k2_[k] + 2.0 * k3_[k] + k4_[k]);
    }

private:
    GridPtr grid_;
    rvec b_;
    double eps_;
    std::size_t n_, half_;
    cvec phys_, spec_;
    cvec k1_, k2_, k3_, k4_, tmp_;
};

bool finite_state(const cvec& u) {
    for (const auto& v : u)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

}  // namespace

ConservationReport evolve_pde(const HardyField& u0, const PotentialSpec& b, double eps, double t_final, double dt,
                              std::size_t stride, const PdeObserver& observer) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_final >= 0.0)) throw std::invalid_argument("t_final must be nonnegative");
    if (stride == 0) throw std::invalid_argument("stride must be positive");
    const auto& grid = u0.grid();
    const rvec bs = b.samples(*grid);
    const std::size_t half = grid->size() / 2;
    const std::size_t steps = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
    const double h = steps > 0 ? t_final / static_cast<double>(steps) : dt;

    SpectralRk4 rk(grid, bs, eps);
    cvec state(u0.spectrum().begin(), u0.spectrum().begin() + static_cast<long>(half));

    ConservationReport rep;
    rep.steps = steps;
    rep.dt = h;
    const double m0 = mass(u0), h0 = hamiltonian(u0, bs, eps), p0 = momentum(u0);
    auto emit = [&](std::size_t i) {
        cvec full(grid->size());
        std::copy(state.begin(), state.end(), full.begin());
        const HardyField u = HardyField::from_spectrum(grid, std::move(full));
        rep.mass_drift = std::max(rep.mass_drift, std::abs(mass(u) - m0) / m0);
        rep.hamiltonian_drift = std::max(rep.hamiltonian_drift, std::abs(hamiltonian(u, bs, eps) - h0) / std::abs(h0));
        rep.momentum_drift = std::max(rep.momentum_drift, std::abs(momentum(u) - p0) / p0);
        if (observer) observer(static_cast<double>(i) * h, u);
    };
    emit(0);
    for (std::size_t i = 1; i <= steps; ++i) {
        rk.step(state, h);
        if ((i % stride == 0 || i == steps) && !finite_state(state))
            throw DivergenceError("non-finite field at step " + std::to_string(i) + " (t = " +
                                  std::to_string(static_cast<double>(i) * h) + ")");
        if (i % stride == 0 || (i == steps && steps % stride != 0)) emit(i);
    }
    return rep;
}

PdeTrajectory evolve_pde(const HardyField& u0, const PotentialSpec& b, double eps, double t_final, double dt,
                         std::size_t stride) {
    PdeTrajectory traj;
    traj.conservation =
        evolve_pde(u0, b, eps, t_final, dt, stride, [&](double t, const HardyField& u) { traj.samples.push_back({t, u}); });
    return traj;
}

std::array<double, 4> effective_rhs(const GroupElement& g, const CoefficientTriple& c) {
    const double al = g.alpha, mu = g.mu;
    return {al * al * mu / 2.0 - 2.0 * c.B / mu, al * c.C, -al * al * mu * mu / 4.0 - c.A - c.B, -2.0 * c.C * mu};
}

std::array<double, 4> effective_rhs(const EffectiveState& s, const PotentialSpec& b, double eps) {
    return effective_rhs(s.g, abc_coefficients(s.g, b, eps));
}

std::array<double, 4> reduced_rhs(const SolitonFamily& family, const GroupElement& g, const rvec& b, double eps) {
    const auto& grid = family.grid();
    const std::size_t n = grid->size();
    const HardyField s = family.profile(g);
    const HardyField v = pde_rhs(s, b, eps);
    const double L = grid->box_length();
    const double q = 2.0 * M_PI / (g.mu * L - 4.0 * M_PI);
    // Raw partials d_l S = m_l(k) c_k for l = a, alpha, phi, mu.
    Mat4 om = Mat4::Zero();
    Vec4 rhs = Vec4::Zero();
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double kk = static_cast<double>(k);
        const cplx c = s.spectrum()[k];
        const std::array<cplx, 4> d{cplx(0.0, -2.0 * M_PI * kk / L) * c, c / g.alpha, cplx(0.0, 1.0) * c,
                                    q * kk / g.mu * c};
        for (int j = 0; j < 4; ++j) {
            rhs(j) += (v.spectrum()[k] * std::conj(d[j])).imag();
            for (int l = 0; l < 4; ++l) om(j, l) += (d[l] * std::conj(d[j])).imag();
        }
    }
    // sum_l omega(d_l S, d_j S) gdot_l = omega(v, d_j S)
    const Vec4 gd = (om * L).partialPivLu().solve(rhs * L);
    return {gd(0), gd(1), gd(2), gd(3)};
}

std::vector<double> uniform_times(double t_final, double spacing) {
    std::vector<double> t;
    const std::size_t m = static_cast<std::size_t>(std::ceil(t_final / spacing - 1e-9));
    for (std::size_t i = 0; i <= m; ++i) t.push_back(std::min(t_final, static_cast<double>(i) * spacing));
    return t;
}

std::vector<EffectiveState> evolve_effective(const EffectiveState& s0, const PotentialSpec& b, double eps,
                                             const std::vector<double>& times, const EffectiveOptions& opts) {
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 4>;
    if (times.empty()) return {};

    std::function<void(const State&, State&, double)> sys;
    std::unique_ptr<SolitonFamily> family;
    rvec bs;
    if (opts.model == EffectiveModel::Grid) {
        if (!opts.grid) throw std::invalid_argument("grid effective model needs a grid");
        family = std::make_unique<SolitonFamily>(opts.grid);
        bs = b.samples(*opts.grid);
        sys = [&](const State& y, State& dy, double) { dy = reduced_rhs(*family, GroupElement::from_array(y), bs, eps); };
    } else {
        sys = [&](const State& y, State& dy, double) {
            dy = effective_rhs(EffectiveState{0.0, GroupElement::from_array(y)}, b, eps);
        };
    }

    std::vector<EffectiveState> out;
    State y = s0.g.as_array();
    auto stepper = ode::make_dense_output(opts.atol, opts.rtol, ode::runge_kutta_dopri5<State>());
    std::vector<double> abs_times;
    for (double t : times) abs_times.push_back(s0.t + t);
    const double span = std::max(1e-300, abs_times.back() - abs_times.front());
    try {
        ode::integrate_times(
            stepper, sys, y, abs_times.begin(), abs_times.end(), std::min(1e-3, span),
            [&](const State& v, double t) { out.push_back({t, GroupElement::from_array(v)}); },
            ode::max_step_checker(1000000));
    } catch (const ode::step_adjustment_error& e) {
        throw StepSizeUnderflow(std::string("effective integration: ") + e.what());
    } catch (const ode::no_progress_error& e) {
        throw StepSizeUnderflow(std::string("effective integration: ") + e.what());
    }
    return out;
}

HardyField w_equation_rhs(const HardyField& w, const GroupElement& g, const std::array<double, 4>& gdot,
                          const PotentialSpec& b, double eps) {
    const auto& grid = w.grid();
    const std::size_t n = grid->size();
    const CoefficientTriple c = abc_coefficients(g, b, eps);
    const LieVector X = x_vector(g, gdot, c);
    const double s = g.alpha * g.alpha * g.mu * g.mu;
    const HardyField e = eta(grid);

    LieVector drive;
    drive[0] = 2.0 * c.B;
    drive[1] = -c.C;
    drive[2] = c.A + c.B;
    drive[3] = 2.0 * c.C;
    LieVector minus_x;
    for (int j = 0; j < 4; ++j) minus_x[j] = -X[j];

    cvec bw(n);
    for (std::size_t j = 0; j < n; ++j)
        bw[j] = b.eval_b(g.a + grid->x()[j] / g.mu) * (e.values()[j] + w.values()[j]);
    const HardyField forcing = szego_project(grid, bw) * cplx(0.0, -eps);

    return lie_apply_eta(minus_x, grid) + lie_apply(minus_x, w) + lie_apply_eta(drive, grid) + lie_apply(drive, w) +
           forcing + times_i(linearized_apply(w)) * s - times_i(nonlinear_remainder(w)) * s;
}

}  // namespace szego
