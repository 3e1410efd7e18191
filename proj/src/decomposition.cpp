#include "szego/decomposition.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "szego/operators.hpp"

namespace szego {

namespace {

struct Partials {
    // d_l(k) for l = a, alpha, phi, mu, so that d_l S has coefficients d_l(k) c_k.
    static std::array<cplx, 4> first(const GroupElement& g, double L, double k) {
        const double q = 2.0 * M_PI / (g.mu * L - 4.0 * M_PI);
        return {cplx(0.0, -2.0 * M_PI * k / L), cplx(1.0 / g.alpha, 0.0), cplx(0.0, 1.0), cplx(q * k / g.mu, 0.0)};
    }
};

}  // namespace

Reparametrizer::Reparametrizer(GridPtr grid, ReparametrizeOptions opts)
    : grid_(std::move(grid)), family_(grid_), opts_(opts) {}

Vec4 Reparametrizer::conditions(const HardyField& u, const GroupElement& g) const {
    const cvec c = family_.coefficients(g);
    const std::size_t half = grid_->size() / 2;
    Vec4 f = Vec4::Zero();
    for (std::size_t k = 0; k < half; ++k) {
        const cplx r = u.spectrum()[k] - c[k];
        const auto m = family_.tangent_multipliers(g, static_cast<long>(k));
        for (int j = 0; j < 4; ++j) f(j) += (r * std::conj(m[j] * c[k])).imag();
    }
    return f * grid_->box_length();
}

Mat4 Reparametrizer::jacobian(const HardyField& u, const GroupElement& g) const {
    const cvec c = family_.coefficients(g);
    const std::size_t half = grid_->size() / 2;
    const double L = grid_->box_length();
    const double den = g.mu * L - 4.0 * M_PI;
    const double dq = -2.0 * M_PI * L / (den * den);
    Mat4 jac = Mat4::Zero();
    for (std::size_t k = 0; k < half; ++k) {
        const double kk = static_cast<double>(k);
        const cplx r = u.spectrum()[k] - c[k];
        const auto m = family_.tangent_multipliers(g, static_cast<long>(k));
        const auto d = Partials::first(g, L, kk);
        // mu-derivatives of the multipliers; the others are constant.
        const std::array<cplx, 4> dm_mu{cplx(0.0, 2.0 * M_PI * kk / (L * g.mu * g.mu)), 0.0, 0.0, cplx(dq * kk, 0.0)};
        for (int j = 0; j < 4; ++j) {
            const cplx t = m[j] * c[k];
            for (int l = 0; l < 4; ++l) {
                cplx dt = m[j] * d[l] * c[k];
                if (l == 3) dt += dm_mu[j] * c[k];
                jac(j, l) += (-(d[l] * c[k]) * std::conj(t) + r * std::conj(dt)).imag();
            }
        }
    }
    return jac * L;
}

Decomposition Reparametrizer::operator()(const HardyField& u, const GroupElement& g_guess) const {
    const double unorm = l2_norm(u);
    GroupElement g = g_guess;
    Decomposition d;
    for (int it = 0;; ++it) {
        const Vec4 f = conditions(u, g);
        const double residual = f.cwiseAbs().maxCoeff() / (g.alpha * g.alpha * g.mu);
        if (residual < opts_.tolerance * unorm) {
            d.newton_iters = it;
            d.residual = residual;
            break;
        }
        if (it >= opts_.max_iterations)
            throw TubularNeighborhoodExceeded("Newton did not converge in " + std::to_string(opts_.max_iterations) +
                                              " iterations (residual " + std::to_string(residual) + ")");
        const Mat4 jac = jacobian(u, g);
        Eigen::JacobiSVD<Mat4> svd(jac);
        const auto& sv = svd.singularValues();
        if (!(sv(3) > 0.0) || sv(0) / sv(3) > opts_.max_condition)
            throw DegenerateParametrization("Jacobian condition number exceeds " + std::to_string(opts_.max_condition));
        const Vec4 step = jac.partialPivLu().solve(f);
        g.a -= step(0);
        g.alpha -= step(1);
        g.phi -= step(2);
        g.mu -= step(3);
        if (!g.valid()) throw TubularNeighborhoodExceeded("Newton left the parameter domain");
    }
    d.g = g;
    d.remainder = u - family_.profile(g);
    const double scale = g.alpha * g.alpha * g.mu;
    double l2 = 0.0, h12 = 0.0;
    for (std::size_t k = 0; k < grid_->size() / 2; ++k) {
        const double p = std::norm(d.remainder.spectrum()[k]);
        const double z = grid_->xi()[k] / g.mu;
        l2 += p;
        h12 += std::sqrt(1.0 + z * z) * p;
    }
    d.w_l2 = std::sqrt(grid_->box_length() * l2 / scale);
    d.w_h12 = std::sqrt(grid_->box_length() * h12 / scale);
    if (d.w_h12 > opts_.tubular_radius)
        throw TubularNeighborhoodExceeded("||w||_H1/2 = " + std::to_string(d.w_h12) + " exceeds the tubular radius");
    return d;
}

std::array<double, 4> Reparametrizer::parameter_velocity(const HardyField& u, const HardyField& udot,
                                                         const GroupElement& g) const {
    const cvec c = family_.coefficients(g);
    Vec4 rhs = Vec4::Zero();
    for (std::size_t k = 0; k < grid_->size() / 2; ++k) {
        const auto m = family_.tangent_multipliers(g, static_cast<long>(k));
        for (int j = 0; j < 4; ++j) rhs(j) += (udot.spectrum()[k] * std::conj(m[j] * c[k])).imag();
    }
    rhs *= grid_->box_length();
    const Vec4 gd = -jacobian(u, g).partialPivLu().solve(rhs);
    return {gd(0), gd(1), gd(2), gd(3)};
}

Decomposition reparametrize(const HardyField& u, const GroupElement& g_guess, const ReparametrizeOptions& opts) {
    return Reparametrizer(u.grid(), opts)(u, g_guess);
}

HardyField soliton_frame_remainder(const Decomposition& d) { return act(inverse(d.g), d.remainder); }

LieVector x_vector(const GroupElement& g, const std::array<double, 4>& gdot, const CoefficientTriple& c) {
    const double al = g.alpha, mu = g.mu;
    LieVector x;
    x[0] = gdot[0] * mu - al * al * mu * mu / 2.0 + 2.0 * c.B;
    x[1] = gdot[1] / al - c.C;
    x[2] = gdot[2] + al * al * mu * mu / 4.0 + c.A + c.B;
    x[3] = gdot[3] / mu + 2.0 * c.C;
    return x;
}

LieVector x_vector(const GroupElement& g, const std::array<double, 4>& gdot, const PotentialSpec& b, double eps) {
    return x_vector(g, gdot, abc_coefficients(g, b, eps));
}

LieVector x_vector_grid(const SolitonFamily& family, const GroupElement& g, const std::array<double, 4>& gdot,
                        const rvec& b_samples, double eps) {
    const LieVector y = lie_velocity(g, gdot);
    const LieVector y0 = lie_velocity(g, reduced_rhs(family, g, b_samples, eps));
    LieVector x;
    for (int j = 0; j < 4; ++j) x[j] = y[j] - y0[j];
    return x;
}

Tracker::Tracker(GridPtr grid, const PotentialSpec& b, double eps, GroupElement g0, double mass0, TrackOptions opts)
    : grid_(std::move(grid)), b_(b), bs_(b.samples(*grid_)), eps_(eps), g0_(g0), mass0_(mass0), opts_(opts),
      rep_(grid_, opts.newton), last_(g0) {
    report_.eps = eps;
}

void Tracker::push(double t, const HardyField& u) {
    Decomposition d;
    try {
        d = rep_(u, last_);
    } catch (const std::exception& e) {
        throw std::runtime_error("decomposition failed at t = " + std::to_string(t) + ": " + e.what());
    }
    last_ = d.g;
    report_.times.push_back(t);
    report_.g_series.push_back(d.g);
    report_.w_h12.push_back(d.w_h12);
    report_.w_l2.push_back(d.w_l2);
    report_.newton_iters.push_back(d.newton_iters);
    const double predicted = mass0_ / (d.g.alpha * d.g.alpha * d.g.mu) - M_PI;
    const double w2 = d.w_l2 * d.w_l2;
    report_.mass_identity_error.push_back(predicted > 1e-10 ? std::abs(w2 - predicted) / predicted : 0.0);
    if (d.g.mu < opts_.mu_window_low * g0_.mu || d.g.mu > opts_.mu_window_high * g0_.mu) report_.left_mu_window = true;
    if (opts_.velocity == VelocityMethod::Implicit) {
        const HardyField udot = pde_rhs(u, bs_, eps_);
        const auto gd = rep_.parameter_velocity(u, udot, d.g);
        report_.gdot_series.push_back(gd);
        report_.x_norm.push_back(x_vector_grid(rep_.family(), d.g, gd, bs_, eps_).norm());
        report_.x_norm_line.push_back(x_vector(d.g, gd, b_, eps_).norm());
    }
}

void Tracker::compare(const std::vector<EffectiveState>& eff) {
    if (eff.size() != report_.times.size()) throw std::invalid_argument("effective run is not aligned with the track");
    report_.deviations.clear();
    for (std::size_t i = 0; i < eff.size(); ++i) {
        const auto& g = report_.g_series[i];
        const auto& e = eff[i].g;
        report_.deviations.push_back(
            {std::abs(g.a - e.a), std::abs(g.alpha - e.alpha), std::abs(g.phi - e.phi), std::abs(g.mu - e.mu)});
    }
    report_.has_effective = true;
}

TrackReport Tracker::finish() {
    if (opts_.velocity == VelocityMethod::Centered) {
        auto& ts = report_.times;
        const std::size_t m = ts.size();
        report_.gdot_series.assign(m, {0.0, 0.0, 0.0, 0.0});
        report_.x_norm.assign(m, 0.0);
        report_.x_norm_line.assign(m, 0.0);
        if (m >= 3) {
            for (std::size_t i = 0; i < m; ++i) {
                std::array<double, 4> gd{};
                const auto at = [&](std::size_t j) { return report_.g_series[j].as_array(); };
                for (int p = 0; p < 4; ++p) {
                    if (i == 0)
                        gd[p] = (-3.0 * at(0)[p] + 4.0 * at(1)[p] - at(2)[p]) / (ts[2] - ts[0]);
                    else if (i == m - 1)
                        gd[p] = (3.0 * at(m - 1)[p] - 4.0 * at(m - 2)[p] + at(m - 3)[p]) / (ts[m - 1] - ts[m - 3]);
                    else
                        gd[p] = (at(i + 1)[p] - at(i - 1)[p]) / (ts[i + 1] - ts[i - 1]);
                }
                report_.gdot_series[i] = gd;
                report_.x_norm[i] = x_vector_grid(rep_.family(), report_.g_series[i], gd, bs_, eps_).norm();
                report_.x_norm_line[i] = x_vector(report_.g_series[i], gd, b_, eps_).norm();
            }
        }
    }
    return report_;
}

TrackReport track(const PdeTrajectory& traj, const PotentialSpec& b, double eps,
                  const std::optional<std::vector<EffectiveState>>& effective, const GroupElement& g_guess,
                  const TrackOptions& opts) {
    if (traj.samples.empty()) return {};
    const auto& u0 = traj.samples.front().u;
    const Decomposition d0 = reparametrize(u0, g_guess, opts.newton);
    Tracker tr(u0.grid(), b, eps, d0.g, mass(u0), opts);
    for (const auto& s : traj.samples) tr.push(s.t, s.u);
    if (effective) tr.compare(*effective);
    return tr.finish();
}

namespace {
double x_ratio_max(const TrackReport& r, const std::vector<double>& x, double eps) {
    double best = 0.0;
    for (std::size_t i = 0; i < x.size() && i < r.w_h12.size(); ++i) {
        const double w = r.w_h12[i];
        const double den = eps * r.w_l2[i] + w * w + w * w * w;
        if (den <= 1e-14) {
            if (x[i] > 1e-12) best = std::numeric_limits<double>::infinity();
            continue;
        }
        best = std::max(best, x[i] / den);
    }
    return best;
}
}  // namespace

TheoremMetrics theorem_metrics(const TrackReport& r, double eps, double delta) {
    TheoremMetrics m;
    m.eps = eps;
    m.delta = delta;
    m.exp_w = 0.5 + delta / 3.0;
    m.exp_a = 0.5 + delta;
    m.exp_phi = 2.0 * delta;
    m.exp_mu = 0.5 + delta;
    for (double w : r.w_h12) m.sup_w_h12 = std::max(m.sup_w_h12, w);
    for (const auto& d : r.deviations)
        for (int p = 0; p < 4; ++p) m.sup_dev[p] = std::max(m.sup_dev[p], d[p]);
    if (!r.g_series.empty()) {
        const auto& g0 = r.g_series.front();
        const double q0 = g0.alpha * g0.alpha * g0.mu;
        for (const auto& g : r.g_series)
            m.alpha2mu_drift = std::max(m.alpha2mu_drift, std::abs(g.alpha * g.alpha * g.mu - q0) / q0);
    }
    m.x_fit = x_ratio_max(r, r.x_norm, eps);
    m.x_fit_line = x_ratio_max(r, r.x_norm_line, eps);
    for (int it : r.newton_iters) m.max_newton_iters = std::max(m.max_newton_iters, it);
    m.left_mu_window = r.left_mu_window;
    return m;
}

}  // namespace szego
