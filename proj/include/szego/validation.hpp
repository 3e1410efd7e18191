#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "szego/config.hpp"

namespace szego {

struct Measurement {
    std::string label;
    double value = 0.0;
    double limit = 0.0;
    bool upper = true;  // value < limit when true, value >= limit otherwise
    bool passed = false;
};

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::vector<Measurement> parts;
    double seconds = 0.0;
    std::string error;  // set when the check threw
};

// The acceptance suite at the grid, seed and parallelism of the config. Progress lines go to `log` if given.
std::vector<CheckResult> run_validation(const ExperimentConfig& c, std::ostream* log = nullptr);

std::string format_check(const CheckResult& r);
void write_validation_json(const std::string& path, const ExperimentConfig& c, const std::vector<CheckResult>& results);

}  // namespace szego
