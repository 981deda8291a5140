#pragma once

#include "alignlab/needspace.hpp"

#include <span>
#include <vector>

namespace alignlab {

// Cobb-Douglas production block: Y = tfp * K^alpha * L^(1-alpha).
struct ProductionParams {
    double tfp = 1.0;
    double alpha = 0.5; // must lie in the open interval (0, 1)
    double capital = 0.0;
    double labor = 0.0;
};

// Ideation cost decays as c0 * exp(-lambda_decay * t).
struct IdeationParams {
    double c0 = 1.0;
    double lambda_decay = 0.0;
};

// Per-need constants.
struct NeedParams {
    double weight = 0.0;        // importance weight
    double delta = 0.0;         // satisfaction decay rate per unit time
    double desired = 1.0;       // target level in [0, sat_max]
    double effectiveness = 1.0; // satisfaction inflow per unit of allocated output
    double error_bound = 0.0;   // exponential error envelope constant k_i
    bool ethics_mask = true;    // false: the filtering stage blocks this need
};

// Employed/idle factor pools. Totals are conserved under reallocation.
struct FactorAllocation {
    double labor_employed = 0.0;
    double labor_idle = 0.0;
    double capital_employed = 0.0;
    double capital_idle = 0.0;
};

enum class ShareMode {
    saturating, // s(y) = 1 - exp(-eta * y)
    linear      // s(y) = eta * y (bang-bang experiments)
};

// Stage parameters of the production-to-experience pipeline.
struct PipelineConfig {
    double eta = 1.0;
    double sat_max = 1.0;
    ShareMode share = ShareMode::saturating;
};

double cobb_douglas(const ProductionParams& p);

// c(t) = c0 * exp(-lambda * t); strictly decreasing for lambda > 0.
double ideation_cost(const IdeationParams& ip, double t);

// a(t) = 1 / (1 + c(t)) in (0, 1]; the shortfall 1 - a(t) is bounded by
// c0 * exp(-lambda * t), which feeds the exponential error envelope.
double alignment_efficiency(const IdeationParams& ip, double t);

// Allocation share curve s(y) and its derivative.
double share_value(const PipelineConfig& cfg, double y);
double share_derivative(const PipelineConfig& cfg, double y);

// Demand-sensing stage: gap_i = max(0, desired_i - x_i).
std::vector<double> demand_gaps(const ExperientialState& x,
                                std::span<const NeedParams> needs);

// Filtering stage: a need passes when its ethics mask is set and its sensed
// gap is positive.
std::vector<char> admissible_needs(const ExperientialState& x,
                                   std::span<const NeedParams> needs);

// Splits a scalar output budget across admissible needs proportionally to
// their weights (equal split if all admissible weights are zero).
std::vector<double> split_by_weight(double total, std::span<const char> admissible,
                                    std::span<const NeedParams> needs);

// Full pipeline for an allocation vector: inflow_i = a(t) * phi_i * s(y_i)
// for admissible needs, zero otherwise.
std::vector<double> need_inflows(std::span<const double> allocation, double t,
                                 const ExperientialState& x,
                                 std::span<const NeedParams> needs,
                                 const IdeationParams& ip,
                                 const PipelineConfig& cfg);

// Scalar-control convenience: weight-splits Y first, then applies the
// pipeline. A fully masked economy yields the zero vector, not an error.
std::vector<double> need_inflows_scalar(double output, double t,
                                        const ExperientialState& x,
                                        std::span<const NeedParams> needs,
                                        const IdeationParams& ip,
                                        const PipelineConfig& cfg);

// Moves idle factors into employment; totals conserved.
FactorAllocation reallocate(const FactorAllocation& f, double d_labor,
                            double d_capital);

// Production-side reading of a satisfaction trajectory: the delivered level
// falls short of the true level by the ideation-friction factor,
//   delivered_i(t) = clamp(x_i(t) * (1 - phi_i * (1 - a(t))), 0, sat_max),
// so |x_i - delivered_i| <= c0 * phi_i * sat_max * exp(-lambda t) pointwise.
std::vector<double> delivered_satisfaction(const ExperientialState& x,
                                           std::span<const NeedParams> needs,
                                           const IdeationParams& ip,
                                           double sat_max);

// Default error-envelope constant for need i under the construction above.
double default_error_bound(const NeedParams& need, const IdeationParams& ip,
                           double sat_max);

} // namespace alignlab
