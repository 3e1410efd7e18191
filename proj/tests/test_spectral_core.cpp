#include <doctest.h>

#include <cmath>
#include <random>

#include "szego/operators.hpp"
#include "szego/spectral_core.hpp"

using namespace szego;

namespace {
const cplx I(0.0, 1.0);
}

TEST_CASE("grid rejects sizes that are not powers of two") {
    CHECK_THROWS_AS(SpectralGrid::make(100, 10.0), DimensionError);
    CHECK_THROWS_AS(SpectralGrid::make(8, 10.0), DimensionError);
    CHECK_THROWS_AS(SpectralGrid::make(64, -1.0), DimensionError);
}

TEST_CASE("forward and backward transforms invert each other") {
    auto grid = SpectralGrid::make(64, 10.0);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    cvec f(64), c(64), back(64);
    for (auto& v : f) v = cplx(nd(rng), nd(rng));
    grid->forward(f.data(), c.data());
    grid->backward(c.data(), back.data());
    for (std::size_t j = 0; j < f.size(); ++j) CHECK(std::abs(back[j] - f[j]) < 1e-13);
}

TEST_CASE("a single Fourier mode has the expected coefficient") {
    auto grid = SpectralGrid::make(64, 2.0 * M_PI);
    const cvec f = sample(*grid, [](double x) { return std::exp(I * 3.0 * x); });
    cvec c(64);
    grid->forward(f.data(), c.data());
    for (std::size_t k = 0; k < 64; ++k) {
        if (grid->wavenumber(k) == 3)
            CHECK(std::abs(c[k] - 1.0) < 1e-13);
        else
            CHECK(std::abs(c[k]) < 1e-13);
    }
}

TEST_CASE("projector keeps nonnegative modes only") {
    auto grid = SpectralGrid::make(64, 2.0 * M_PI);
    const HardyField u = szego_project(grid, sample(*grid, [](double x) { return 2.0 * std::cos(2.0 * x); }));
    for (std::size_t j = 0; j < u.size(); ++j) CHECK(std::abs(u.values()[j] - std::exp(I * 2.0 * grid->x()[j])) < 1e-13);
    const HardyField again = szego_project(grid, u.values());
    for (std::size_t j = 0; j < u.size(); ++j) CHECK(std::abs(again.values()[j] - u.values()[j]) < 1e-13);
}

TEST_CASE("projection of 1/(1+x^2) is (i/2)/(x+i) up to box effects") {
    // Partial fractions: 1/(1+x^2) = (i/2) [1/(x+i) - 1/(x-i)], and only 1/(x+i) is analytic above.
    auto grid = SpectralGrid::make(8192, 256.0);
    const HardyField p = szego_project(grid, sample(*grid, [](double x) { return cplx(1.0 / (1.0 + x * x)); }));
    double err = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double x = grid->x()[j];
        err = std::max(err, std::abs(p.values()[j] - 0.5 * I / cplx(x, 1.0)));
    }
    CHECK(err < 10.0 / grid->box_length());
}

TEST_CASE("Sobolev norms of a single mode") {
    auto grid = SpectralGrid::make(128, 20.0);
    const double xi = 2.0 * M_PI * 5.0 / 20.0;
    const HardyField u = szego_project(grid, sample(*grid, [&](double x) { return std::exp(I * xi * x); }));
    CHECK(l2_norm(u) == doctest::Approx(std::sqrt(20.0)).epsilon(1e-12));
    CHECK(sobolev_norm(u, 0.5) == doctest::Approx(std::sqrt(20.0 * std::sqrt(1.0 + xi * xi))).epsilon(1e-12));
    CHECK(sobolev_norm(u, 0.5, true) == doctest::Approx(std::sqrt(20.0 * xi)).epsilon(1e-12));
    CHECK(l2_norm_physical(u) == doctest::Approx(l2_norm(u)).epsilon(1e-12));
    CHECK_THROWS_AS(sobolev_norm(u, 1.0), UnsupportedExponent);
}

TEST_CASE("derivative multiplies by i xi") {
    auto grid = SpectralGrid::make(128, 2.0 * M_PI);
    const HardyField u = szego_project(grid, sample(*grid, [](double x) { return std::exp(I * 4.0 * x); }));
    const HardyField du = derivative(u);
    for (std::size_t j = 0; j < u.size(); ++j) CHECK(std::abs(du.values()[j] - 4.0 * I * u.values()[j]) < 1e-12);
}

TEST_CASE("symplectic pairing is antisymmetric and inner product is symmetric") {
    auto grid = SpectralGrid::make(256, 30.0);
    std::mt19937_64 rng(3);
    const HardyField u = random_hardy_field(grid, rng), v = random_hardy_field(grid, rng);
    CHECK(symplectic_pair(u, v) == doctest::Approx(-symplectic_pair(v, u)).epsilon(1e-12));
    CHECK(inner_real(u, v) == doctest::Approx(inner_real(v, u)).epsilon(1e-12));
    CHECK(std::abs(symplectic_pair(u, u)) < 1e-14);
    // omega(u, v) = <u, i v>_real
    CHECK(symplectic_pair(u, v) == doctest::Approx(inner_real(u, times_i(v))).epsilon(1e-12));
}

TEST_CASE("random Hardy fields are normalized and reproducible") {
    auto grid = SpectralGrid::make(512, 40.0);
    std::mt19937_64 a(11), b(11);
    const HardyField u = random_hardy_field(grid, a), v = random_hardy_field(grid, b);
    CHECK(l2_norm(u) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t j = 0; j < u.size(); ++j) CHECK(u.values()[j] == v.values()[j]);
    for (std::size_t k = 0; k < u.size(); ++k)
        if (!grid->kept(k)) CHECK(u.spectrum()[k] == cplx(0.0, 0.0));
}

TEST_CASE("sampled 1/(x+i) leaks a small share into negative modes") {
    // The slow 1/x decay makes the periodized profile discontinuous in derivative at the box edge.
    auto grid = SpectralGrid::make(8192, 256.0);
    const auto s = synthesize(grid, [](double x) { return 1.0 / cplx(x, 1.0); });
    CHECK(s.discarded_fraction > 1e-4);
    CHECK(s.discarded_fraction < 1e-2);
    // Its momentum is still close to the line value pi/2.
    CHECK(std::abs(momentum(s.field) - M_PI / 2.0) < 10.0 / grid->box_length());
}

TEST_CASE("non-finite samples are rejected") {
    auto grid = SpectralGrid::make(64, 10.0);
    CHECK_THROWS_AS(sample(*grid, [](double x) { return x > 0.0 ? cplx(NAN, 0.0) : cplx(1.0, 0.0); }),
                    NonFiniteSample);
}

TEST_CASE("fields on different grids do not mix") {
    auto g1 = SpectralGrid::make(64, 10.0), g2 = SpectralGrid::make(128, 10.0);
    CHECK_THROWS_AS(HardyField::zero(g1) + HardyField::zero(g2), DimensionError);
}
