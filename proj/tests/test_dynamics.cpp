#include <doctest.h>

#include <gsl/gsl_integration.h>

#include <cmath>
#include <functional>

#include "szego/decomposition.hpp"
#include "szego/dynamics.hpp"
#include "szego/operators.hpp"

using namespace szego;

namespace {

const cplx I(0.0, 1.0);

// Integral over the real line by GSL's transformed adaptive rule.
double qagi(const std::function<double(double)>& f) {
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
    gsl_function F;
    F.function = [](double x, void* p) { return (*static_cast<const std::function<double(double)>*>(p))(x); };
    F.params = const_cast<std::function<double(double)>*>(&f);
    double result = 0.0, err = 0.0;
    gsl_integration_qagi(&F, 1e-15, 1e-13, 2000, ws, &result, &err);
    gsl_integration_workspace_free(ws);
    return result;
}

CoefficientTriple abc_oracle(const GroupElement& g, const PotentialSpec& b, double eps) {
    // A = (eps/pi) int b(a + x/mu) / (1 + x^2), B = (eps/pi) int b'(a + x/mu) x / (1 + x^2) / mu,
    // C = (eps/pi) int b'(a + x/mu) / (1 + x^2) / mu.
    const double k = eps / M_PI;
    CoefficientTriple c;
    c.A = k * qagi([&](double x) { return b.eval_b(g.a + x / g.mu) / (1.0 + x * x); });
    c.B = k * qagi([&](double x) { return b.eval_db(g.a + x / g.mu) * x / (1.0 + x * x) / g.mu; });
    c.C = k * qagi([&](double x) { return b.eval_db(g.a + x / g.mu) / (1.0 + x * x) / g.mu; });
    return c;
}

}  // namespace

TEST_CASE("coefficient integrals agree with an adaptive quadrature oracle") {
    const auto b = PotentialSpec::gaussian(1.0, 0.0, 1.0);
    for (const GroupElement& g : {identity(), GroupElement{0.7, 1.2, 0.3, 1.3}, GroupElement{-4.0, 0.8, 0.0, 0.6}}) {
        const auto c = abc_coefficients(g, b, 0.01);
        const auto o = abc_oracle(g, b, 0.01);
        CHECK(c.A == doctest::Approx(o.A).epsilon(1e-10));
        CHECK(std::abs(c.B - o.B) < 1e-14);
        CHECK(std::abs(c.C - o.C) < 1e-14);
    }
    // Reference values at the identity and at (0.7, 1.2, 0.3, 1.3).
    const auto c0 = abc_coefficients(identity(), b, 0.01);
    CHECK(c0.A == doctest::Approx(0.004275835761558).epsilon(1e-10));
    CHECK(c0.B == doctest::Approx(-0.00273212014783899).epsilon(1e-10));
    CHECK(std::abs(c0.C) < 1e-16);
    const auto c1 = abc_coefficients(GroupElement{0.7, 1.2, 0.3, 1.3}, b, 0.01);
    CHECK(c1.A == doctest::Approx(0.0040422853555834555).epsilon(1e-10));
    CHECK(c1.B == doctest::Approx(-0.0015989149857039678).epsilon(1e-10));
    CHECK(c1.C == doctest::Approx(-0.0018288841086431353).epsilon(1e-10));
}

TEST_CASE("coefficients for sech^2 and tabulated potentials") {
    const GroupElement g{1.5, 1.0, 0.0, 0.9};
    const auto s = PotentialSpec::sech2(0.8, 1.0, 2.0);
    const auto cs = abc_coefficients(g, s, 0.02), os = abc_oracle(g, s, 0.02);
    CHECK(cs.A == doctest::Approx(os.A).epsilon(1e-9));
    CHECK(cs.B == doctest::Approx(os.B).epsilon(1e-9));
    CHECK(cs.C == doctest::Approx(os.C).epsilon(1e-9));
    // A step-like table: b tends to 0 on the left and 1 on the right.
    const auto t = PotentialSpec::table({-2.0, -1.0, 0.0, 1.0, 2.0}, {0.0, 0.1, 0.5, 0.9, 1.0});
    const auto ct = abc_coefficients(g, t, 0.02), ot = abc_oracle(g, t, 0.02);
    CHECK(ct.A == doctest::Approx(ot.A).epsilon(1e-8));
    CHECK(ct.C == doctest::Approx(ot.C).epsilon(1e-8));
}

TEST_CASE("constant potential only shifts the phase") {
    const GroupElement g{2.0, 1.3, 0.0, 0.7};
    const auto c = abc_coefficients(g, PotentialSpec::constant(0.5), 0.1);
    CHECK(c.A == doctest::Approx(0.05));
    CHECK(c.B == 0.0);
    CHECK(c.C == 0.0);
    const auto r = effective_rhs(g, c);
    CHECK(r[1] == 0.0);
    CHECK(r[3] == 0.0);
}

TEST_CASE("effective flow at eps = 0 is the free soliton motion") {
    const GroupElement g{0.0, 1.3, 0.2, 0.7};
    const auto r = effective_rhs(EffectiveState{0.0, g}, PotentialSpec::gaussian(1.0, 0.0, 1.0), 0.0);
    CHECK(r[0] == doctest::Approx(g.alpha * g.alpha * g.mu / 2.0));
    CHECK(r[1] == 0.0);
    CHECK(r[2] == doctest::Approx(-g.alpha * g.alpha * g.mu * g.mu / 4.0));
    CHECK(r[3] == 0.0);
}

TEST_CASE("grid reduced flow reproduces the free motion at eps = 0") {
    auto grid = SpectralGrid::make(2048, 128.0);
    const SolitonFamily fam(grid);
    const GroupElement g{1.0, 1.2, 0.5, 0.9};
    const auto r = reduced_rhs(fam, g, rvec(grid->size(), 0.0), 0.0);
    CHECK(r[0] == doctest::Approx(g.alpha * g.alpha * g.mu / 2.0).epsilon(1e-10));
    CHECK(std::abs(r[1]) < 1e-12);
    CHECK(r[2] == doctest::Approx(-g.alpha * g.alpha * g.mu * g.mu / 4.0).epsilon(1e-10));
    CHECK(std::abs(r[3]) < 1e-12);
}

TEST_CASE("PDE keeps the circle soliton on its exact spectral orbit") {
    // For c_k = beta p^k, Pi(|u|^2 u)_k = K c_k (k + 1/(1 - |p|^2)) with K = |beta|^2 / (1 - |p|^2),
    // so c_k(t) = c_k(0) exp(-i (omega + k K) t) with omega = K / (1 - |p|^2).
    auto grid = SpectralGrid::make(1024, 64.0);
    const GroupElement g{0.5, 1.1, 0.3, 1.2};
    const SolitonFamily fam(grid);
    const HardyField u0 = fam.profile(g);
    const double r2 = std::pow(fam.pole_radius(g.mu), 2);
    const double K = std::pow(2.0 * M_PI * g.alpha / grid->box_length(), 2) / (1.0 - r2);
    const double omega = K / (1.0 - r2);
    const double T = 3.0;
    const auto traj = evolve_pde(u0, PotentialSpec::constant(0.0), 0.0, T, 1e-3, 1000);
    const auto& uT = traj.samples.back().u;
    CHECK(traj.samples.back().t == doctest::Approx(T));
    double err = 0.0;
    for (std::size_t k = 0; k < grid->size() / 2; ++k) {
        const cplx expected = u0.spectrum()[k] * std::exp(-I * (omega + static_cast<double>(k) * K) * T);
        err = std::max(err, std::abs(uT.spectrum()[k] - expected));
    }
    CHECK(err < 1e-12);
    CHECK(traj.conservation.mass_drift < 1e-13);
    CHECK(traj.conservation.momentum_drift < 1e-12);
}

TEST_CASE("step count lands on the final time and samples follow the stride") {
    auto grid = SpectralGrid::make(256, 32.0);
    const auto traj = evolve_pde(eta(grid), PotentialSpec::constant(0.0), 0.0, 1.05, 0.1, 3);
    CHECK(traj.conservation.steps == 11);
    CHECK(traj.conservation.dt == doctest::Approx(1.05 / 11.0));
    REQUIRE(traj.samples.size() == 5);
    CHECK(traj.samples[1].t == doctest::Approx(3.0 * 1.05 / 11.0));
    CHECK(traj.samples.back().t == doctest::Approx(1.05));
    CHECK_THROWS_AS(evolve_pde(eta(grid), PotentialSpec::constant(0.0), 0.0, 1.0, 0.0, 1), std::invalid_argument);
}

TEST_CASE("perturbed flow conserves mass and H_b but not momentum") {
    auto grid = SpectralGrid::make(1024, 64.0);
    const auto rep = evolve_pde(eta(grid), PotentialSpec::gaussian(1.0, 0.0, 1.0), 0.05, 2.0, 1e-3, 100, {});
    CHECK(rep.mass_drift < 1e-12);
    CHECK(rep.hamiltonian_drift < 1e-11);
    CHECK(rep.momentum_drift > 1e-5);
}

TEST_CASE("effective ODE with constant potential has the closed-form solution") {
    const GroupElement g0{0.2, 1.1, 0.4, 0.9};
    const double eps = 0.1, c = 0.5, T = 5.0;
    const auto states = evolve_effective({0.0, g0}, PotentialSpec::constant(c), eps, uniform_times(T, 0.5));
    REQUIRE(states.size() == 11);
    const auto& g = states.back().g;
    CHECK(g.a == doctest::Approx(g0.a + g0.alpha * g0.alpha * g0.mu * T / 2.0).epsilon(1e-9));
    CHECK(g.alpha == doctest::Approx(g0.alpha).epsilon(1e-12));
    CHECK(g.phi == doctest::Approx(g0.phi - (g0.alpha * g0.alpha * g0.mu * g0.mu / 4.0 + eps * c) * T).epsilon(1e-9));
    CHECK(g.mu == doctest::Approx(g0.mu).epsilon(1e-12));
}

TEST_CASE("effective ODE conserves alpha^2 mu") {
    const GroupElement g0{-1.0, 1.2, 0.0, 1.1};
    const auto states =
        evolve_effective({0.0, g0}, PotentialSpec::gaussian(1.0, 0.0, 1.0), 0.05, uniform_times(20.0, 1.0));
    const double q0 = g0.alpha * g0.alpha * g0.mu;
    for (const auto& s : states) CHECK(std::abs(s.g.alpha * s.g.alpha * s.g.mu - q0) < 1e-9 * q0);
    // The soliton does move through the bump.
    CHECK(std::abs(states.back().g.mu - g0.mu) > 1e-4);
}

TEST_CASE("uniform times end exactly at the horizon") {
    const auto t = uniform_times(1.05, 0.5);
    REQUIRE(t.size() == 4);
    CHECK(t.back() == 1.05);
    CHECK(t[1] == 0.5);
}

TEST_CASE("remainder equation vanishes on the free soliton") {
    // With eps = 0, w = 0 and gdot on the free motion, X = 0 and every forcing term drops out.
    auto grid = SpectralGrid::make(8192, 256.0);
    const GroupElement g = identity();
    const auto gdot = effective_rhs(EffectiveState{0.0, g}, PotentialSpec::constant(0.0), 0.0);
    const HardyField r = w_equation_rhs(HardyField::zero(grid), g, gdot, PotentialSpec::constant(0.0), 0.0);
    CHECK(l2_norm(r) < 1e-12);
}
