#include "szego/potential.hpp"

#include <algorithm>
#include <cmath>

// This Boost release calls unqualified isnan inside pchip.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include <memory>
#include <stdexcept>

namespace szego {

PotentialSpec::PotentialSpec(std::string kind, std::function<double(double)> b, std::function<double(double)> db)
    : kind_(std::move(kind)), b_(std::move(b)), db_(std::move(db)) {}

void PotentialSpec::finalize(std::pair<double, double> window, double far_left, double far_right) {
    window_ = window;
    has_support_ = window.second > window.first;
    far_left_ = far_left;
    far_right_ = far_right;
    sup_ = std::max(std::abs(far_left), std::abs(far_right));
    db_l1_ = 0.0;
    db_l2_ = 0.0;
    if (!has_support_) return;
    const int m = 20000;
    const double h = (window.second - window.first) / m;
    for (int i = 0; i <= m; ++i) {
        const double y = window.first + h * i;
        const double w = (i == 0 || i == m) ? 0.5 * h : h;
        sup_ = std::max(sup_, std::abs(b_(y)));
        db_l1_ += w * std::abs(db_(y));
        db_l2_ += w * db_(y) * db_(y);
    }
    db_l2_ = std::sqrt(db_l2_);
}

PotentialSpec PotentialSpec::gaussian(double amplitude, double center, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
    PotentialSpec p(
        "gaussian",
        [=](double y) {
            const double s = (y - center) / width;
            return amplitude * std::exp(-s * s);
        },
        [=](double y) {
            const double s = (y - center) / width;
            return -2.0 * amplitude * s / width * std::exp(-s * s);
        });
    // exp(-s^2) < 1e-30 beyond |s| = 8.4
    p.finalize({center - 9.0 * width, center + 9.0 * width}, 0.0, 0.0);
    return p;
}

PotentialSpec PotentialSpec::sech2(double amplitude, double center, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("sech2 width must be positive");
    PotentialSpec p(
        "sech2",
        [=](double y) {
            const double c = 1.0 / std::cosh((y - center) / width);
            return amplitude * c * c;
        },
        [=](double y) {
            const double s = (y - center) / width;
            const double c = 1.0 / std::cosh(s);
            return -2.0 * amplitude / width * c * c * std::tanh(s);
        });
    // 4 e^{-2|s|} < 1e-30 beyond |s| = 35.2
    p.finalize({center - 36.0 * width, center + 36.0 * width}, 0.0, 0.0);
    return p;
}

PotentialSpec PotentialSpec::constant(double value) {
    PotentialSpec p("constant", [=](double) { return value; }, [](double) { return 0.0; });
    p.finalize({0.0, 0.0}, value, value);
    return p;
}

PotentialSpec PotentialSpec::table(std::vector<double> xs, std::vector<double> bs) {
    if (xs.size() != bs.size() || xs.size() < 4) throw std::invalid_argument("table needs >= 4 matching points");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("table abscissae must increase strictly");
    const double x0 = xs.front(), x1 = xs.back(), b0 = bs.front(), b1 = bs.back();
    using Interp = boost::math::interpolators::pchip<std::vector<double>>;
    // Zero end slopes make b continuously differentiable across the window edges.
    auto interp = std::make_shared<Interp>(std::move(xs), std::move(bs), 0.0, 0.0);
    PotentialSpec p(
        "table",
        [=](double y) { return y <= x0 ? b0 : (y >= x1 ? b1 : (*interp)(y)); },
        [=](double y) { return (y <= x0 || y >= x1) ? 0.0 : interp->prime(y); });
    p.finalize({x0, x1}, b0, b1);
    return p;
}

rvec PotentialSpec::samples(const SpectralGrid& grid) const {
    rvec out(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) out[j] = b_(grid.x()[j]);
    return out;
}

}  // namespace szego
