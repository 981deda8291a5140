#pragma once

#include "alignlab/scenario.hpp"
#include "alignlab/theorems.hpp"

#include <string>
#include <vector>

namespace alignlab {

struct VerifyOutcome {
    TrajectoryBundle bundle;
    StatePath delivered;
    std::vector<double> sup_gap;
    std::vector<CheckCertificate> certificates; // aggregated in name order
    bool all_passed = false;
};

// Production-side reading of a solved trajectory plus its sup-norm gap.
StatePath delivered_path(const StatePath& ideal, const ScenarioConfig& cfg);

// Attainable utility supremum over the unmasked needs,
// sum_i w_i min(sat_max, desired_i, max-inflow_i/delta_i).
double attainable_supremum(const ScenarioConfig& cfg);

// Runs the solver and every certificate whose name matches the suite filter.
// Filter semantics: empty matches everything, "=name" matches exactly,
// anything else matches as a substring.
VerifyOutcome run_verification(const ScenarioConfig& cfg,
                               const std::string& suite_filter = "");

} // namespace alignlab
