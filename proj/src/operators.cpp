#include "szego/operators.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

#include "szego/potential.hpp"
#include "szego/soliton_manifold.hpp"

namespace szego {

HardyField toeplitz_apply(const rvec& b, const HardyField& h) {
    const auto& grid = h.grid();
    if (b.size() != grid->size()) throw DimensionError("potential samples do not match grid");
    cvec f(h.values());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] *= b[j];
    return szego_project(grid, f);
}

HardyField toeplitz_apply(const PotentialSpec& b, const HardyField& h) {
    return toeplitz_apply(b.samples(*h.grid()), h);
}

HardyField hankel_apply(const HardyField& u, const HardyField& h) {
    require_same_grid(u, h);
    cvec f(u.values());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] *= std::conj(h.values()[j]);
    return szego_project(u.grid(), f);
}

OperatorDiagnostics hankel_rank(const HardyField& u, double tol, std::size_t m) {
    const auto& grid = u.grid();
    if (m == 0 || m > grid->size() / 2) throw DimensionError("hankel_rank: m exceeds the nonnegative modes");
    Eigen::MatrixXcd mat(m, m);
    for (std::size_t j = 0; j < m; ++j) {
        cvec e(grid->size());
        e[j] = 1.0 / std::sqrt(grid->box_length());
        const HardyField ej = HardyField::from_spectrum(grid, std::move(e));
        const HardyField col = hankel_apply(u, ej);
        for (std::size_t k = 0; k < m; ++k) mat(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
            col.spectrum()[k] * std::sqrt(grid->box_length());
    }
    OperatorDiagnostics d;
    // Symmetry (H_u e_j, e_k) = (H_u e_k, e_j): the matrix is complex symmetric.
    d.symmetry_defect = (mat - mat.transpose()).cwiseAbs().maxCoeff();
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(mat);
    const auto& sv = svd.singularValues();
    d.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double smax = d.singular_values.empty() ? 0.0 : d.singular_values.front();
    for (double s : d.singular_values)
        if (s > tol * smax) ++d.rank_estimate;
    return d;
}

cvec blaschke_factor(const SpectralGrid& grid) {
    const SolitonFamily family(std::shared_ptr<const SpectralGrid>(&grid, [](const SpectralGrid*) {}));
    const double p = family.pole_radius(1.0);
    const double L = grid.box_length();
    cvec chi(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const cplx z = std::polar(1.0, 2.0 * M_PI * grid.x()[j] / L);
        chi[j] = (z - p) / (1.0 - p * z);
    }
    return chi;
}

HardyField kernel_witness(const HardyField& h) {
    const cvec chi = blaschke_factor(*h.grid());
    cvec f(h.values());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] *= chi[j] * chi[j];
    return szego_project(h.grid(), f);
}

HardyField linearized_apply(const HardyField& w) {
    const auto& grid = w.grid();
    const HardyField e = eta(grid);
    const std::size_t n = grid->size();
    cvec pot(n);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx ej = e.values()[j];
        pot[j] = 2.0 * std::norm(ej) * w.values()[j] + ej * ej * std::conj(w.values()[j]);
    }
    return derivative(w) * cplx(0.0, -0.5) - szego_project(grid, pot) + w * 0.25;
}

HardyField nonlinear_remainder(const HardyField& w) {
    const auto& grid = w.grid();
    const HardyField e = eta(grid);
    cvec f(grid->size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        const cplx wj = w.values()[j];
        const cplx ej = e.values()[j];
        const double w2 = std::norm(wj);
        f[j] = w2 * wj + w2 * ej + 2.0 * wj * (ej * std::conj(wj)).real();
    }
    return szego_project(grid, f);
}

double mass(const HardyField& u) {
    const double n = l2_norm(u);
    return n * n;
}

double momentum(const HardyField& u) {
    const double n = sobolev_norm(u, 0.5, true);
    return n * n;
}

double energy_E(const HardyField& u) {
    const auto& g = *u.grid();
    double quartic = 0.0, disp = 0.0;
    for (const auto& v : u.values()) quartic += std::norm(v) * std::norm(v);
    // Re(i int u' conj u) = -L sum xi_k |c_k|^2
    for (std::size_t k = 0; k < g.size(); ++k) disp -= g.xi()[k] * std::norm(u.spectrum()[k]);
    return 0.25 * quartic * g.dx() + 0.25 * disp * g.box_length() - 0.125 * mass(u);
}

double hamiltonian(const HardyField& u, const rvec& b, double eps) {
    const auto& g = *u.grid();
    if (b.size() != g.size()) throw DimensionError("potential samples do not match grid");
    double quartic = 0.0, pot = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double m = std::norm(u.values()[j]);
        quartic += m * m;
        pot += b[j] * m;
    }
    return (0.25 * quartic + 0.5 * eps * pot) * g.dx();
}

double hamiltonian(const HardyField& u, const PotentialSpec& b, double eps) {
    return hamiltonian(u, b.samples(*u.grid()), eps);
}

HardyField energy_gradient(const HardyField& u) {
    cvec f(u.values());
    for (auto& v : f) v *= std::norm(v);
    return derivative(u) * cplx(0.0, 0.5) + szego_project(u.grid(), f) - u * 0.25;
}

}  // namespace szego
