#pragma once

#include "alignlab/control.hpp"
#include "alignlab/economy.hpp"
#include "alignlab/theorems.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace alignlab {

// Discovery-experiment parameters ([frontier] section).
struct FrontierConfig {
    double discovery_slope = 1.0;
    double new_weight = 0.1;
    double new_attainable = 0.5;
    double step = 1.0;
};

// Per-need scenario entry: the model constants plus the initial satisfaction
// level and the meaning marker.
struct NeedConfig {
    NeedParams params;
    double initial = 0.0;
    bool meaning = false;
    bool error_bound_set = false; // explicit k_i overrides the derived default
};

struct ScenarioConfig {
    std::string name = "unnamed";
    std::uint64_t seed = 0;
    PipelineConfig pipeline;
    ProductionParams production;
    IdeationParams ideation;
    SolverConfig solver;
    FactorAllocation factors;
    std::vector<NeedConfig> needs;
    std::vector<FrontierAdd> frontier_adds;
    std::optional<FrontierConfig> frontier;
    bool y_max_set = false; // false: y_max defaults to employed-factor output

    std::size_t dims() const { return needs.size(); }

    PlannerModel model() const;
    ExperientialState initial_state() const;
    WeightVector weights() const;
    std::vector<double> error_bounds() const; // k_i (explicit or derived)

    // Truncated tail mass of the weights beyond the modelled dimensions.
    // All modelled weights are in-file, so this is identically zero; the
    // validator reports it explicitly.
    double truncation_tail() const { return 0.0; }
};

struct ParseIssue {
    int line = 0; // 0 when the issue is not tied to a source line
    std::string message;
};

struct ParseResult {
    std::optional<ScenarioConfig> config; // set only when there are no issues
    std::vector<ParseIssue> issues;

    bool ok() const { return config.has_value(); }
    std::string issues_text() const;
};

// Parses the line-oriented scenario grammar ('#' comments, [section] headers,
// key = value pairs). Collects every violation instead of stopping at the
// first. Overrides are dotted keys ("solver.rho=0.1", "need.3.delta=0.5")
// applied after parsing and before validation.
ParseResult parse_scenario(const std::string& text,
                           const std::vector<std::string>& overrides = {});

// Canonical text form; parse -> emit is idempotent and numbers carry 17
// significant digits so 64-bit round-trips are exact.
std::string emit_scenario(const ScenarioConfig& config);

// Re-validates an in-memory config (used after programmatic edits).
std::vector<ParseIssue> validate_scenario(const ScenarioConfig& config);

} // namespace alignlab
