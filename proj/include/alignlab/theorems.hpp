#pragma once

#include "alignlab/control.hpp"
#include "alignlab/economy.hpp"
#include "alignlab/needspace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace alignlab {

struct Witness {
    std::string name;
    double value = 0.0;
};

// Outcome of one numerical certification: pass/fail plus the numbers that
// decided it.
struct CheckCertificate {
    std::string name;
    bool passed = false;
    std::vector<Witness> witness;
    double tolerance = 0.0;
    std::string notes;

    const double* find(const std::string& witness_name) const;
};

// Discovery frontier: dimension count, the stock of needs beyond the
// automated production map, and the linear discovery coefficient.
struct FrontierState {
    int active_dims = 0;
    double beyond_measure = 0.0;
    double discovery_slope = 0.0; // f(L_h) = slope * L_h
};

// A dimension-add event for the frontier-expansion check.
struct FrontierAdd {
    double weight = 0.0;
    double attainable = 0.0;
};

// sup-norm ideal-vs-delivered gap per grid point.
std::vector<double> sup_gap_series(const StatePath& ideal, const StatePath& delivered);

// Exponential error envelope: passes iff
//   sup_i |x_i(t) - xhat_i(t)| <= k_star exp(-lambda t) + tol at every grid t,
// with k_star = max_i k_i. Witness: worst (lhs - rhs) and where it occurs.
CheckCertificate check_bounded_error(const StatePath& ideal,
                                     const StatePath& delivered,
                                     std::span<const double> k, double lambda_decay,
                                     double tol = kTolAbs);

// Fits the log of a positive error series against time on the tail (second
// half of the horizon); passes iff the slope matches -lambda within 5%
// relative and, when lambda*T >= 4, the final error is below a tenth of the
// initial one. Exact zeros restrict the fit to the nonzero prefix (noted).
CheckCertificate check_convergence_rate(std::span<const double> times,
                                        std::span<const double> errors,
                                        double lambda_decay);

// Pointwise utility bound |U(x)-U(xhat)| <= ||w||_1 * sup-gap at every grid
// time plus a tail condition: utility gap over the last quarter of the
// horizon below tol_conv = 1e-3 * ||w||_1 * sat_max.
CheckCertificate check_utility_convergence(const WeightVector& w,
                                           const StatePath& ideal,
                                           const StatePath& delivered,
                                           double sat_max);

// Terminal utility within tol_opt (relative) of the attainable supremum
// sum_i w_i min(sat_max, desired_i, max-inflow_i / delta_i) over unmasked
// needs. Unconverged bundles fail with a note.
CheckCertificate check_asymptotic_optimality(const TrajectoryBundle& bundle,
                                             const PlannerModel& model,
                                             const SolverConfig& cfg,
                                             double tol_opt = 0.02);

// The attainable supremum must strictly increase at every positive-weight
// dimension-add event. Witness: minimum increment.
CheckCertificate check_frontier_expansion(double base_supremum,
                                          std::span<const FrontierAdd> schedule);

// Rolling back dimensions removes exactly their utility contribution:
// U(after) = U(before) - sum w_i x_i, strictly below U(before) when every
// rolled-back dimension contributes positively.
CheckCertificate check_irreversibility(const ExperientialState& x,
                                       const WeightVector& w,
                                       std::span<const std::size_t> rollback);

// Suppressing the meaning dimension caps utility at
// ||w||_1 sat_max - w_m sat_max, strictly below the full supremum; the
// certificate reports the shortfall w_m * sat_max. Fails when w_m = 0
// (premise violation).
CheckCertificate check_meaning_irreducibility(const WeightVector& w, double sat_max);

struct ParetoImprovement {
    double d_labor = 0.0;
    double d_capital = 0.0;
    double delta_u = 0.0;
    std::vector<double> sat_after;
};

// One-period marginal employment experiment: employ the idle pools,
// recompute output, push the marginal output through the pipeline for one
// unit of time and account the utility change. No satisfaction level ever
// decreases. Returns nullopt exactly when there are no idle factors or no
// unmet unmasked needs.
std::optional<ParetoImprovement>
find_pareto_improvement(const FactorAllocation& factors, const ProductionParams& prod,
                        std::span<const NeedParams> needs, const ExperientialState& x,
                        const IdeationParams& ip, const PipelineConfig& pipeline,
                        double t = 0.0);

// Wraps the Pareto experiment as a certificate: premises hold => strictly
// positive utility gain with no satisfaction decrease; premises fail =>
// no improvement reported.
CheckCertificate check_unemployment_irrationality(
    const FactorAllocation& factors, const ProductionParams& prod,
    std::span<const NeedParams> needs, const ExperientialState& x,
    const IdeationParams& ip, const PipelineConfig& pipeline, double t = 0.0);

// Discovery-value experiment: beyond_measure grows by slope * L_h * dt and
// the discovered measure converts into new dimensions worth
// w_new * attainable each. Passes iff positive labor with positive slope and
// weight yields delta_U > 0 and zero labor yields exactly zero.
CheckCertificate check_full_employment_value(const FrontierState& frontier,
                                             double labor_hours, double w_new,
                                             double attainable, double dt);

// delta_U of the discovery experiment (exposed for grid tests).
double discovery_delta_u(const FrontierState& frontier, double labor_hours,
                         double w_new, double attainable, double dt);

// Advances the frontier bookkeeping: accumulates measure and converts whole
// units into active dimensions.
FrontierState advance_frontier(const FrontierState& frontier, double labor_hours,
                               double dt);

} // namespace alignlab
