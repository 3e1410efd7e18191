#pragma once

#include <functional>
#include <string>
#include <utility>

#include "szego/spectral_core.hpp"

namespace szego {

// Real potential b with derivative. Outside the support window b is constant
// (far_left for y < window.first, far_right for y > window.second) and b' = 0.
class PotentialSpec {
public:
    static PotentialSpec gaussian(double amplitude, double center, double width);
    static PotentialSpec sech2(double amplitude, double center, double width);
    static PotentialSpec constant(double value);
    // Shape-preserving cubic interpolation of tabulated values, constant beyond the ends.
    static PotentialSpec table(std::vector<double> xs, std::vector<double> bs);

    double eval_b(double y) const { return b_(y); }
    double eval_db(double y) const { return db_(y); }
    const std::string& kind() const { return kind_; }
    bool has_support() const { return has_support_; }
    std::pair<double, double> window() const { return window_; }
    double far_left() const { return far_left_; }
    double far_right() const { return far_right_; }
    bool is_constant() const { return kind_ == "constant"; }

    double sup_norm() const { return sup_; }
    double db_l1() const { return db_l1_; }
    double db_l2() const { return db_l2_; }

    rvec samples(const SpectralGrid& grid) const;

private:
    PotentialSpec(std::string kind, std::function<double(double)> b, std::function<double(double)> db);
    void finalize(std::pair<double, double> window, double far_left, double far_right);

    std::string kind_;
    std::function<double(double)> b_;
    std::function<double(double)> db_;
    bool has_support_ = false;
    std::pair<double, double> window_{0.0, 0.0};
    double far_left_ = 0.0;
    double far_right_ = 0.0;
    double sup_ = 0.0;
    double db_l1_ = 0.0;
    double db_l2_ = 0.0;
};

}  // namespace szego
