#include "szego/soliton_manifold.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace szego {

double GroupElement::wrapped_phase() const {
    double p = std::fmod(phi, 2.0 * M_PI);
    if (p < 0.0) p += 2.0 * M_PI;
    return p;
}

bool GroupElement::valid() const {
    return std::isfinite(a) && std::isfinite(alpha) && std::isfinite(phi) && std::isfinite(mu) && alpha > 0.0 &&
           mu > 0.0;
}

double LieVector::norm() const { return std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]); }

GroupElement identity() { return {0.0, 1.0, 0.0, 1.0}; }

GroupElement compose(const GroupElement& g, const GroupElement& h) {
    return {g.a + h.a / g.mu, g.alpha * h.alpha, g.phi + h.phi, g.mu * h.mu};
}

GroupElement inverse(const GroupElement& g) { return {-g.a * g.mu, 1.0 / g.alpha, -g.phi, 1.0 / g.mu}; }

HardyField act(const GroupElement& g, const HardyField& u, ActReport* report) {
    const auto& grid = *u.grid();
    const std::size_t n = grid.size();
    const auto& c = u.spectrum();
    double cmax = 0.0;
    for (const auto& ck : c) cmax = std::max(cmax, std::abs(ck));
    cvec out(n);
    if (cmax == 0.0) return HardyField::zero(u.grid());

    const double nyquist = M_PI / grid.dx();
    bool aliasing = false;
    constexpr std::size_t block = 64;
    for (std::size_t k = 0; k < n; ++k) {
        if (!grid.kept(k) || std::abs(c[k]) <= 1e-18 * cmax) continue;
        const double freq = grid.xi()[k] * g.mu;
        if (freq >= nyquist) aliasing = true;
        const cplx step = std::polar(1.0, freq * grid.dx());
        cplx ph;
        for (std::size_t j = 0; j < n; ++j) {
            if (j % block == 0) ph = std::polar(1.0, freq * (grid.x()[j] - g.a));
            out[j] += c[k] * ph;
            ph *= step;
        }
    }
    const cplx factor = std::polar(g.alpha * g.mu, g.phi);
    for (auto& v : out) v *= factor;
    if (report) report->aliasing = aliasing;
    return szego_project(u.grid(), out);
}

SolitonFamily::SolitonFamily(GridPtr grid) : grid_(std::move(grid)) {}

void SolitonFamily::check_scale(double mu) const {
    const double L = grid_->box_length();
    if (!(mu > 0.0) || mu * L <= 8.0 * M_PI)
        throw ScaleOutOfRange("scale mu = " + std::to_string(mu) + " too small for box length " + std::to_string(L));
    // The dropped coefficient tail r^(n/2) must stay below exp(-30) ~ 1e-13.
    const double r = pole_radius(mu);
    const double log_tail = 0.5 * static_cast<double>(grid_->size()) * std::log(r);
    if (log_tail > -30.0)
        throw ScaleOutOfRange("scale mu = " + std::to_string(mu) + " not resolved by " +
                              std::to_string(grid_->size()) + " points: dropped tail r^(n/2) = " +
                              fmt::format("{:.3e}", std::exp(log_tail)) + " exceeds exp(-30)");
}

double SolitonFamily::pole_radius(double mu) const {
    return std::sqrt(1.0 - 4.0 * M_PI / (mu * grid_->box_length()));
}

cvec SolitonFamily::coefficients(const GroupElement& g) const {
    check_scale(g.mu);
    const double L = grid_->box_length();
    const std::size_t n = grid_->size();
    const cplx beta = cplx(0.0, -2.0 * M_PI * g.alpha / L) * std::polar(1.0, g.phi);
    const cplx p = std::polar(pole_radius(g.mu), -2.0 * M_PI * g.a / L);
    cvec c(n);
    cplx pk = 1.0;
    for (std::size_t k = 0; k < n / 2; ++k) {
        c[k] = beta * pk;
        pk *= p;
        // Renormalize the modulus drift of the running power every so often.
        if ((k & 255U) == 255U) pk = std::polar(std::pow(pole_radius(g.mu), static_cast<double>(k + 1)), std::arg(pk));
    }
    return c;
}

HardyField SolitonFamily::profile(const GroupElement& g) const { return HardyField::from_spectrum(grid_, coefficients(g)); }

std::array<cplx, 4> SolitonFamily::tangent_multipliers(const GroupElement& g, long k) const {
    const double L = grid_->box_length();
    const double kk = static_cast<double>(k);
    const double q = 2.0 * M_PI / (g.mu * L - 4.0 * M_PI);
    return {cplx(0.0, -2.0 * M_PI * kk / (L * g.mu)), cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(q * kk, 0.0)};
}

std::array<HardyField, 4> SolitonFamily::frame(const GroupElement& g) const {
    const cvec c = coefficients(g);
    const std::size_t n = grid_->size();
    std::array<cvec, 4> t;
    for (auto& v : t) v.assign(n, 0.0);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const auto m = tangent_multipliers(g, static_cast<long>(k));
        for (int j = 0; j < 4; ++j) t[j][k] = m[j] * c[k];
    }
    return {HardyField::from_spectrum(grid_, std::move(t[0])), HardyField::from_spectrum(grid_, std::move(t[1])),
            HardyField::from_spectrum(grid_, std::move(t[2])), HardyField::from_spectrum(grid_, std::move(t[3]))};
}

HardyField soliton_profile(const GridPtr& grid, const GroupElement& g) { return SolitonFamily(grid).profile(g); }

HardyField eta(const GridPtr& grid) { return soliton_profile(grid, identity()); }

HardyField lie_apply(const LieVector& Y, const HardyField& u) {
    const auto& grid = u.grid();
    const HardyField du = derivative(u);
    cvec xdu(grid->size());
    for (std::size_t j = 0; j < grid->size(); ++j) xdu[j] = grid->x()[j] * du.values()[j];
    const HardyField dilation = u + szego_project(grid, xdu);
    return du * (-Y[0]) + u * Y[1] + u * cplx(0.0, Y[2]) + dilation * Y[3];
}

HardyField lie_apply_eta(const LieVector& Y, const GridPtr& grid) {
    const auto f = SolitonFamily(grid).frame(identity());
    return f[0] * Y[0] + f[1] * Y[1] + f[2] * Y[2] + f[3] * Y[3];
}

Mat4 omega_eta_matrix(const SpectralGrid& grid) {
    // e1 eta = (x+i)^-2, e2 eta = (x+i)^-1, e3 eta = i (x+i)^-1, e4 eta = i (x+i)^-2.
    const std::size_t n = grid.size();
    std::array<cvec, 4> e;
    for (auto& v : e) v.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx w = 1.0 / cplx(grid.x()[j], 1.0);
        e[0][j] = w * w;
        e[1][j] = w;
        e[2][j] = cplx(0.0, 1.0) * w;
        e[3][j] = cplx(0.0, 1.0) * w * w;
    }
    Mat4 m = Mat4::Zero();
    for (int i = 0; i < 4; ++i) {
        for (int k = i + 1; k < 4; ++k) {
            rvec integrand(n);
            for (std::size_t j = 0; j < n; ++j) integrand[j] = (e[i][j] * std::conj(e[k][j])).imag();
            m(i, k) = quadrature(grid, integrand);
            m(k, i) = -m(i, k);
        }
    }
    return m;
}

Mat4 omega_family_matrix(const SolitonFamily& family, const GroupElement& g) {
    const auto f = family.frame(g);
    Mat4 m = Mat4::Zero();
    for (int i = 0; i < 4; ++i) {
        for (int k = i + 1; k < 4; ++k) {
            m(i, k) = symplectic_pair(f[i], f[k]);
            m(k, i) = -m(i, k);
        }
    }
    return m;
}

LieVector explicit_projection(const std::array<double, 4>& w) {
    // w[j] = omega(u, e_{j+1} eta)
    const double s = 2.0 / M_PI;
    LieVector p;
    p[0] = s * (w[1] - 2.0 * w[3]);
    p[1] = s * (-w[2] - w[0]);
    p[2] = s * (w[1] - w[3]);
    p[3] = s * (2.0 * w[0] + w[2]);
    return p;
}

LieVector manifold_project(const HardyField& u) {
    const SolitonFamily family(u.grid());
    const auto f = family.frame(identity());
    const Mat4 m = omega_family_matrix(family, identity());
    // Find c with omega(u - sum_k c_k f_k, f_j) = 0 for every j.
    Vec4 rhs;
    for (int j = 0; j < 4; ++j) rhs(j) = symplectic_pair(u, f[j]);
    const Vec4 c = m.transpose().partialPivLu().solve(rhs);
    LieVector out;
    for (int j = 0; j < 4; ++j) out[j] = c(j);
    return out;
}

std::array<double, 4> hamiltonian_field_on_M(const std::array<double, 4>& df, const GroupElement& g) {
    if (!(g.alpha > 0.0) || !(g.mu > 0.0)) throw std::domain_error("hamiltonian_field_on_M needs alpha, mu > 0");
    const double al = g.alpha, mu = g.mu;
    const double fa = df[0], fal = df[1], fph = df[2], fmu = df[3];
    const double c1 = 2.0 / (al * al * mu * mu * M_PI);
    const double c2 = 2.0 / (al * al * mu * M_PI);
    return {-c1 * (-2.0 * mu * fmu + al * fal), c1 * (al * fa + al * mu * fph), c2 * (mu * fmu - al * fal),
            -c2 * (mu * fph + 2.0 * fa)};
}

Mat4 omega_on_M(const GroupElement& g) {
    const double s = g.alpha * g.alpha * g.mu * M_PI / 2.0;
    Mat4 w = Mat4::Zero();
    auto set = [&](int i, int j, double v) {
        w(i, j) = v;
        w(j, i) = -v;
    };
    // Coordinates (a, alpha, phi, mu); entry (i, j) is the coefficient of dq_i ^ dq_j.
    set(1, 0, s * g.mu / g.alpha);
    set(3, 0, s);
    set(2, 1, 2.0 * s / g.alpha);
    set(2, 3, s / g.mu);
    return w;
}

LieVector lie_velocity(const GroupElement& g, const std::array<double, 4>& gdot) {
    LieVector y;
    y[0] = gdot[0] * g.mu;
    y[1] = gdot[1] / g.alpha;
    y[2] = gdot[2];
    y[3] = gdot[3] / g.mu;
    return y;
}

}  // namespace szego
