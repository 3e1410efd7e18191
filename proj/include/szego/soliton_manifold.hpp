#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>

#include "szego/spectral_core.hpp"

namespace szego {

// (a, alpha, phi, mu). phi is kept unwrapped so tracked phases stay continuous;
// wrapped_phase() gives the representative in [0, 2pi).
struct GroupElement {
    double a = 0.0;
    double alpha = 1.0;
    double phi = 0.0;
    double mu = 1.0;

    std::array<double, 4> as_array() const { return {a, alpha, phi, mu}; }
    static GroupElement from_array(const std::array<double, 4>& v) { return {v[0], v[1], v[2], v[3]}; }
    double wrapped_phase() const;
    bool valid() const;
};

struct LieVector {
    std::array<double, 4> y{0.0, 0.0, 0.0, 0.0};

    double norm() const;
    double operator[](std::size_t i) const { return y[i]; }
    double& operator[](std::size_t i) { return y[i]; }
};

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

struct ScaleOutOfRange : std::domain_error {
    using std::domain_error::domain_error;
};

GroupElement identity();
GroupElement compose(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);

// Spectral resampling of a general field: e^{i phi} alpha mu u(mu(x - a)).
struct ActReport {
    bool aliasing = false;  // rescaled spectrum reaches beyond the grid band
};
HardyField act(const GroupElement& g, const HardyField& u, ActReport* report = nullptr);

// Periodic soliton family on the grid: the circle Szego soliton
//   S(g)(x) = beta / (1 - p z),  z = exp(2 pi i x / L),
// with beta = -2 pi i alpha e^{i phi} / L, p = r e^{-2 pi i a / L}, r = sqrt(1 - 4 pi / (mu L)).
// It tends to e^{i phi} alpha / (x - a + i/mu) as L grows, has mass pi alpha^2 mu exactly and
// is an exact traveling wave of the discrete flow.
class SolitonFamily {
public:
    explicit SolitonFamily(GridPtr grid);

    const GridPtr& grid() const { return grid_; }
    void check_scale(double mu) const;
    double pole_radius(double mu) const;

    cvec coefficients(const GroupElement& g) const;
    HardyField profile(const GroupElement& g) const;
    // Pushforward tangents g.(e_j eta) = ((1/mu) d_a, alpha d_alpha, d_phi, mu d_mu) S(g).
    std::array<HardyField, 4> frame(const GroupElement& g) const;

    // Multipliers m_j(k) with (tangent_j)_k = m_j(k) c_k and their mu-derivatives.
    std::array<cplx, 4> tangent_multipliers(const GroupElement& g, long k) const;

private:
    GridPtr grid_;
};

HardyField soliton_profile(const GridPtr& grid, const GroupElement& g);
HardyField eta(const GridPtr& grid);

HardyField lie_apply(const LieVector& Y, const HardyField& u);
// Y . eta on the soliton family, i.e. sum_j Y_j (e_j eta) with family tangents.
HardyField lie_apply_eta(const LieVector& Y, const GridPtr& grid);

// Pairings of the analytic generator fields e_j eta on the line, by grid quadrature.
Mat4 omega_eta_matrix(const SpectralGrid& grid);
// Same pairings for the grid soliton family frame at g (includes the factor alpha^2 mu).
Mat4 omega_family_matrix(const SolitonFamily& family, const GroupElement& g);

// Closed-form inverse of the reference table applied to the four pairings omega(u, e_j eta).
LieVector explicit_projection(const std::array<double, 4>& pairings);

LieVector manifold_project(const HardyField& u);

std::array<double, 4> hamiltonian_field_on_M(const std::array<double, 4>& df, const GroupElement& g);
Mat4 omega_on_M(const GroupElement& g);

// Lie coordinates of a parameter velocity: (a' mu, alpha'/alpha, phi', mu'/mu).
LieVector lie_velocity(const GroupElement& g, const std::array<double, 4>& gdot);

}  // namespace szego
