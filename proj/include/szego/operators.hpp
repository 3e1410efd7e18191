#pragma once

#include <cstddef>
#include <vector>

#include "szego/spectral_core.hpp"

namespace szego {

class PotentialSpec;

struct OperatorDiagnostics {
    double symmetry_defect = 0.0;
    std::size_t rank_estimate = 0;
    std::vector<double> singular_values;
};

HardyField toeplitz_apply(const rvec& b_samples, const HardyField& h);
HardyField toeplitz_apply(const PotentialSpec& b, const HardyField& h);
HardyField hankel_apply(const HardyField& u, const HardyField& h);

// Dense matrix of H_u on the first m nonnegative modes, singular values and rank at tol * sigma_max.
OperatorDiagnostics hankel_rank(const HardyField& u, double tol = 1e-8, std::size_t m = 256);

// Inner factor of the soliton family at the identity; tends to -(x - i)/(x + i) on large boxes.
cvec blaschke_factor(const SpectralGrid& grid);
HardyField kernel_witness(const HardyField& h);

HardyField linearized_apply(const HardyField& w);
HardyField nonlinear_remainder(const HardyField& w);

double mass(const HardyField& u);
double momentum(const HardyField& u);
double energy_E(const HardyField& u);
double hamiltonian(const HardyField& u, const rvec& b_samples, double eps);
double hamiltonian(const HardyField& u, const PotentialSpec& b, double eps);

// (i/2) u' + Pi(|u|^2 u) - u/4, the gradient of the energy E.
HardyField energy_gradient(const HardyField& u);

}  // namespace szego
