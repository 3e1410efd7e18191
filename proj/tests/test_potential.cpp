#include <doctest.h>

#include <cmath>

#include "szego/potential.hpp"

using namespace szego;

TEST_CASE("Gaussian potential values and norms") {
    const auto b = PotentialSpec::gaussian(2.0, 1.0, 0.5);
    CHECK(b.eval_b(1.0) == doctest::Approx(2.0));
    const double y = 1.3, s = (y - 1.0) / 0.5;
    CHECK(b.eval_b(y) == doctest::Approx(2.0 * std::exp(-s * s)));
    CHECK(b.eval_db(y) == doctest::Approx(-2.0 * s / 0.5 * 2.0 * std::exp(-s * s)));
    CHECK(b.has_support());
    CHECK(b.sup_norm() == doctest::Approx(2.0).epsilon(1e-6));
    // b' changes sign once, so its L1 norm is twice the peak.
    CHECK(b.db_l1() == doctest::Approx(4.0).epsilon(1e-6));
    const auto [lo, hi] = b.window();
    CHECK(b.eval_b(lo) < 1e-30);
    CHECK(b.eval_b(hi) < 1e-30);
}

TEST_CASE("sech^2 potential") {
    const auto b = PotentialSpec::sech2(1.5, -2.0, 2.0);
    CHECK(b.eval_b(-2.0) == doctest::Approx(1.5));
    const double h = 1e-6;
    CHECK(b.eval_db(-1.0) == doctest::Approx((b.eval_b(-1.0 + h) - b.eval_b(-1.0 - h)) / (2.0 * h)).epsilon(1e-7));
    CHECK(b.db_l1() == doctest::Approx(3.0).epsilon(1e-5));
}

TEST_CASE("constant potential has no support window") {
    const auto b = PotentialSpec::constant(0.7);
    CHECK_FALSE(b.has_support());
    CHECK(b.eval_b(123.0) == doctest::Approx(0.7));
    CHECK(b.eval_db(-5.0) == 0.0);
    CHECK(b.far_left() == doctest::Approx(0.7));
    CHECK(b.far_right() == doctest::Approx(0.7));
}

TEST_CASE("tabulated potential interpolates monotonically and extends flat") {
    const auto b = PotentialSpec::table({-2.0, -1.0, 0.0, 1.0, 2.0}, {0.0, 0.2, 1.0, 0.2, 0.0});
    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) CHECK(std::isfinite(b.eval_b(x)));
    CHECK(b.eval_b(0.0) == doctest::Approx(1.0));
    CHECK(b.eval_b(-1.0) == doctest::Approx(0.2));
    CHECK(b.eval_b(-10.0) == doctest::Approx(0.0));
    CHECK(b.eval_b(10.0) == doctest::Approx(0.0));
    CHECK(b.eval_db(10.0) == 0.0);
    // Shape preservation: no overshoot between monotone nodes.
    for (double x = -2.0; x <= 0.0; x += 0.01) CHECK(b.eval_b(x) <= 1.0 + 1e-12);
    for (double x = -2.0; x < 0.0; x += 0.01) CHECK(b.eval_db(x) >= -1e-12);
}

TEST_CASE("samples follow the grid coordinates") {
    auto grid = SpectralGrid::make(64, 16.0);
    const auto b = PotentialSpec::gaussian(1.0, 0.0, 1.0);
    const rvec s = b.samples(*grid);
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(s[j] == doctest::Approx(b.eval_b(grid->x()[j])));
}
