// Acceptance suite at the default grid: one PASS/FAIL line per criterion.

#include <iostream>

#include "szego/config.hpp"
#include "szego/validation.hpp"

int main() {
    const szego::ExperimentConfig config;
    const auto results = szego::run_validation(config, &std::cout);
    int failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << results.size() - static_cast<std::size_t>(failed) << " of " << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
