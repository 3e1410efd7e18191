#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

#include "szego/potential.hpp"
#include "szego/soliton_manifold.hpp"
#include "szego/spectral_core.hpp"

namespace szego {

struct CoefficientTriple {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
};

struct EffectiveState {
    double t = 0.0;
    GroupElement g;
};

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepSizeUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Which reduced dynamics stands in for the effective flow.
//   Line: the ODE with coefficient integrals over the real line.
//   Grid: the symplectic projection of the discrete PDE field onto the grid soliton family.
enum class EffectiveModel { Line, Grid };

CoefficientTriple abc_coefficients(const GroupElement& g, const PotentialSpec& b, double eps);

HardyField pde_rhs(const HardyField& u, const rvec& b_samples, double eps);
HardyField pde_rhs(const HardyField& u, const PotentialSpec& b, double eps);

struct ConservationReport {
    double mass_drift = 0.0;         // max relative deviation of the mass
    double hamiltonian_drift = 0.0;  // max relative deviation of H_b
    double momentum_drift = 0.0;     // max relative deviation of the homogeneous H^1/2 momentum
    std::size_t steps = 0;
    double dt = 0.0;
};

struct PdeSample {
    double t = 0.0;
    HardyField u;
};

struct PdeTrajectory {
    std::vector<PdeSample> samples;
    ConservationReport conservation;
};

using PdeObserver = std::function<void(double t, const HardyField& u)>;

// Classical RK4 in spectral variables; negative modes never enter the state.
// The step is t_final / ceil(t_final / dt) so the run lands on t_final.
ConservationReport evolve_pde(const HardyField& u0, const PotentialSpec& b, double eps, double t_final, double dt,
                              std::size_t stride, const PdeObserver& observer);
PdeTrajectory evolve_pde(const HardyField& u0, const PotentialSpec& b, double eps, double t_final, double dt,
                         std::size_t stride);

std::array<double, 4> effective_rhs(const EffectiveState& s, const PotentialSpec& b, double eps);
std::array<double, 4> effective_rhs(const GroupElement& g, const CoefficientTriple& abc);

// Parameter velocity of the grid-consistent reduced flow at S(g).
std::array<double, 4> reduced_rhs(const SolitonFamily& family, const GroupElement& g, const rvec& b_samples,
                                  double eps);

struct EffectiveOptions {
    EffectiveModel model = EffectiveModel::Line;
    double rtol = 1e-10;
    double atol = 1e-12;
    GridPtr grid;  // required for the grid model
};

// Adaptive Dormand-Prince 5(4) integration, reported at the requested times.
std::vector<EffectiveState> evolve_effective(const EffectiveState& s0, const PotentialSpec& b, double eps,
                                             const std::vector<double>& times, const EffectiveOptions& opts = {});
std::vector<double> uniform_times(double t_final, double spacing);

// Right-hand side of the remainder equation in the soliton frame.
HardyField w_equation_rhs(const HardyField& w, const GroupElement& g, const std::array<double, 4>& gdot,
                          const PotentialSpec& b, double eps);

}  // namespace szego
