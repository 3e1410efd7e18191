#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "szego/dynamics.hpp"
#include "szego/soliton_manifold.hpp"
#include "szego/spectral_core.hpp"

namespace szego {

struct TubularNeighborhoodExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateParametrization : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// u = g.(eta + w). The remainder is kept in the lab frame, r = u - S(g) = g.w;
// its soliton-frame norms follow from the change of variables.
struct Decomposition {
    GroupElement g;
    HardyField remainder;
    double w_l2 = 0.0;
    double w_h12 = 0.0;
    double residual = 0.0;  // max_j |omega(w, e_j eta)|
    int newton_iters = 0;
};

struct ReparametrizeOptions {
    double tolerance = 1e-11;  // on the orthogonality conditions, relative to ||u||_L2
    int max_iterations = 50;
    double tubular_radius = 0.25;  // on ||w||_H^1/2
    double max_condition = 1e12;
};

class Reparametrizer {
public:
    explicit Reparametrizer(GridPtr grid, ReparametrizeOptions opts = {});

    Decomposition operator()(const HardyField& u, const GroupElement& g_guess) const;

    // Orthogonality conditions F_j(g) = omega(u - S(g), g.(e_j eta)) and their g-Jacobian.
    Vec4 conditions(const HardyField& u, const GroupElement& g) const;
    Mat4 jacobian(const HardyField& u, const GroupElement& g) const;

    // Exact dg/dt from differentiating F(u(t), g(t)) = 0 along u' = udot.
    std::array<double, 4> parameter_velocity(const HardyField& u, const HardyField& udot, const GroupElement& g) const;

    const SolitonFamily& family() const { return family_; }

private:
    GridPtr grid_;
    SolitonFamily family_;
    ReparametrizeOptions opts_;
};

Decomposition reparametrize(const HardyField& u, const GroupElement& g_guess, const ReparametrizeOptions& opts = {});

// w itself, resampled into the soliton frame.
HardyField soliton_frame_remainder(const Decomposition& d);

LieVector x_vector(const GroupElement& g, const std::array<double, 4>& gdot, const CoefficientTriple& abc);
LieVector x_vector(const GroupElement& g, const std::array<double, 4>& gdot, const PotentialSpec& b, double eps);
// Deviation of gdot from the grid reduced flow, in the same Lie coordinates.
LieVector x_vector_grid(const SolitonFamily& family, const GroupElement& g, const std::array<double, 4>& gdot,
                        const rvec& b_samples, double eps);

enum class VelocityMethod { Implicit, Centered };

struct TrackOptions {
    EffectiveModel model = EffectiveModel::Grid;
    VelocityMethod velocity = VelocityMethod::Implicit;
    ReparametrizeOptions newton;
    double mu_window_low = 0.5;  // relative to mu0
    double mu_window_high = 1.5;
};

struct TrackReport {
    std::vector<double> times;
    std::vector<GroupElement> g_series;
    std::vector<std::array<double, 4>> gdot_series;
    std::vector<double> w_h12;
    std::vector<double> w_l2;
    std::vector<double> x_norm;
    std::vector<double> x_norm_line;  // X measured against the line ODE
    std::vector<int> newton_iters;
    std::vector<double> mass_identity_error;  // relative
    std::vector<std::array<double, 4>> deviations;  // |g - gbar| per parameter, if an effective run is given
    bool has_effective = false;
    bool left_mu_window = false;
    double eps = 0.0;
};

// Sequential tracker: feed PDE samples in time order.
class Tracker {
public:
    Tracker(GridPtr grid, const PotentialSpec& b, double eps, GroupElement g0, double mass0, TrackOptions opts = {});

    void push(double t, const HardyField& u);
    // Attach the effective run (same sample times) and fill in the deviations.
    void compare(const std::vector<EffectiveState>& effective);
    TrackReport finish();

private:
    GridPtr grid_;
    const PotentialSpec& b_;
    rvec bs_;
    double eps_;
    GroupElement g0_;
    double mass0_;
    TrackOptions opts_;
    Reparametrizer rep_;
    TrackReport report_;
    GroupElement last_;
};

TrackReport track(const PdeTrajectory& traj, const PotentialSpec& b, double eps,
                  const std::optional<std::vector<EffectiveState>>& effective, const GroupElement& g_guess,
                  const TrackOptions& opts = {});

struct TheoremMetrics {
    double eps = 0.0;
    double delta = 0.0;
    double sup_w_h12 = 0.0;
    std::array<double, 4> sup_dev{0.0, 0.0, 0.0, 0.0};  // a, alpha, phi, mu
    double alpha2mu_drift = 0.0;
    // Predicted exponents for sup||w||, |a - abar|, |phi - phibar|, |mu - mubar|.
    double exp_w = 0.0, exp_a = 0.0, exp_phi = 0.0, exp_mu = 0.0;
    double x_fit = 0.0;  // max ||X|| / (eps ||w||_L2 + ||w||^2 + ||w||^3)
    double x_fit_line = 0.0;
    int max_newton_iters = 0;
    bool left_mu_window = false;
};

TheoremMetrics theorem_metrics(const TrackReport& report, double eps, double delta);

}  // namespace szego
