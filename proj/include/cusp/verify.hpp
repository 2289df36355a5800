#pragma once

#include <string>
#include <utility>
#include <vector>

namespace cusp {

struct CheckResult {
    std::string name;
    int criterion = 0;
    bool pass = false;
    double measured = 0.0;   // worst observed quantity
    double threshold = 0.0;  // bound it is compared against
    double seconds = 0.0;
    double budget = 0.0;     // runtime budget in seconds (part of the pass condition)
    std::vector<std::pair<std::string, double>> metrics;
    std::string detail;
};

struct VerifyConfig {
    // media (a0, b0) for the transmission suite and the Green's nine-branch check
    std::vector<std::pair<double, double>> media{{5.0, 5.0}, {5.0, 0.5}, {0.2, 3.0}};
    double alpha = 0.8;   // symmetric contrast for trace/expansion/derivative checks
    double beta = -0.5;   // second contrast for the correspondence check
    double R0 = 3.0;
    std::vector<double> dominance_alphas{0.9, -0.9};
    std::vector<double> dominance_R0{2.05, 3.0, 5.0};
    // solver-vs-oracle problem
    double oracle_a0 = 5.0, oracle_b0 = 0.5;
    int n_trace = 512;          // boundary-correction θ-grid for the nonhomogeneous solve
    int nonhom_stride = 8;      // comparison-cell stride for the nonhomogeneous case (h = 1/128)
    bool corrupt_sign = false;  // negative control: flips the contrast sign on the inclusion side
};

std::vector<std::string> battery_names();

// One named check; unknown names throw ConfigError.
CheckResult run_check(const std::string& name, const VerifyConfig& cfg);

std::vector<CheckResult> run_battery(const std::vector<std::string>& names, const VerifyConfig& cfg);

}  // namespace cusp
