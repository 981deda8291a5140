#pragma once

#include "alignlab/economy.hpp"
#include "alignlab/needspace.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace alignlab {

enum class CostateMode : std::uint8_t { present_value, current_value, paper_literal };
enum class ControlMode : std::uint8_t { scalar_bounded, allocation_simplex };

const char* to_string(CostateMode m);
const char* to_string(ControlMode m);
const char* to_string(ShareMode m);

struct SolverConfig {
    double rho = 0.05;     // discount rate, > 0
    double horizon = 40.0; // truncation horizon T, > 0
    int steps = 2000;      // grid intervals, >= 2 grid points
    double relaxation = 0.5;
    double tol = 1e-6;
    int max_iter = 500;
    CostateMode costate_mode = CostateMode::current_value;
    ControlMode control_mode = ControlMode::allocation_simplex;
    double y_max = 1.0; // control capacity bound, > 0
};

// Shared time grid: steps intervals over [0, horizon].
std::vector<double> make_grid(const SolverConfig& cfg);

struct StatePath {
    std::vector<double> times;
    std::vector<std::vector<double>> values; // values[k][i] = x_i(t_k)

    ExperientialState at(std::size_t k) const { return {times[k], values[k]}; }
};

struct CostatePath {
    std::vector<double> times;
    std::vector<std::vector<double>> values; // shadow prices per grid point
    CostateMode mode = CostateMode::current_value;
};

struct ControlPath {
    std::vector<double> times;
    // Scalar mode: values[k] has one entry. Allocation mode: N entries with
    // y_i >= 0 and sum <= y_max at every grid point.
    std::vector<std::vector<double>> values;
    ControlMode mode = ControlMode::allocation_simplex;
};

struct TrajectoryBundle {
    StatePath state_path;
    CostatePath costate_path;
    ControlPath control_path;
    double utility_integral = 0.0; // trapezoid of exp(-rho t) U(x(t))
    std::vector<double> running_utility;       // cumulative discounted utility per t
    std::vector<double> hamiltonian_residual; // projected-gradient residual per t
    int iterations = 0;
    bool converged = false;
    std::vector<double> utility_per_iteration; // diagnostic series
    long clamp_events = 0;
};

// Everything the planner dynamics need besides the solver knobs.
struct PlannerModel {
    std::vector<NeedParams> needs;
    IdeationParams ideation;
    PipelineConfig pipeline;

    WeightVector weights() const {
        WeightVector w;
        w.w.reserve(needs.size());
        for (const auto& n : needs) w.w.push_back(n.weight);
        return w;
    }
};

// dx_i/dt = inflow_i(ctrl) - delta_i * x_i. `control` carries one entry in
// scalar mode or N entries in allocation mode.
std::vector<double> state_rhs(const ExperientialState& x,
                              std::span<const double> control, ControlMode mode,
                              double t, const PlannerModel& model);

// Present-value Hamiltonian
//   H = exp(-rho t) U(x) + sum_i costate_i (inflow_i - delta_i x_i).
// The costate must be tagged present_value; transform other modes first.
double hamiltonian(const ExperientialState& x, std::span<const double> control,
                   ControlMode cmode, std::span<const double> costate,
                   CostateMode costate_mode, double t, const PlannerModel& model,
                   const SolverConfig& cfg);

// Converts a costate value between conventions at time t (present-value
// lambda vs current-value mu = exp(rho t) lambda; paper_literal values have
// no exact counterpart and are rejected).
std::vector<double> costate_to_present_value(std::span<const double> value,
                                             CostateMode mode, double t, double rho);

// Right-hand side of the co-state system in the configured mode:
//   present_value:  dl_i/dt = -exp(-rho t) w_i + delta_i l_i
//   current_value:  dm_i/dt = (rho + delta_i) m_i - w_i
//   paper_literal:  dl_i/dt = rho l_i - exp(-rho t) w_i + delta_i l_i
std::vector<double> costate_rhs(std::span<const double> costate, CostateMode mode,
                                double t, const PlannerModel& model,
                                const SolverConfig& cfg);

struct ControlGradient {
    std::vector<double> d; // dH/dY (one entry) or dH/dy_i per component
    bool is_linear = false; // linear share: gradient constant in the control,
                            // no interior root exists (bang-bang regime)
};

// Analytic gradient of the Hamiltonian with respect to the control, holding
// the admissible set fixed at the current state. Works in any costate mode
// (the maximiser is invariant under the positive present/current scaling);
// the gradient is returned in the costate's own scale.
ControlGradient dh_dcontrol(const ExperientialState& x,
                            std::span<const double> control, ControlMode cmode,
                            std::span<const double> costate, double t,
                            const PlannerModel& model);

// Pointwise Hamiltonian maximisation over the admissible control set.
// scalar_bounded: argmax over [0, y_max] (bisection on the gradient, else the
// better bound). allocation_simplex: water-filling that equalises
// costate-weighted marginal inflow values across needs under the budget.
// All costates <= 0 degenerates to the zero control.
std::vector<double> maximize_hamiltonian(const ExperientialState& x,
                                         std::span<const double> costate, double t,
                                         const PlannerModel& model,
                                         const SolverConfig& cfg);

// Classical fixed-step RK4 on the state system; control linearly interpolated
// between grid points. Entries are clamped to [0, sat_max] after each step;
// clamp_events counts them. Throws IntegrationFailure on non-finite values.
StatePath integrate_forward(const ExperientialState& x0, const ControlPath& control,
                            const PlannerModel& model, const SolverConfig& cfg,
                            long* clamp_events = nullptr);

// Backward RK4 on the co-state system from the terminal condition
// (transversality surrogate: zero at the truncation horizon).
CostatePath integrate_backward(std::span<const double> terminal_costate,
                               const StatePath& states, const PlannerModel& model,
                               const SolverConfig& cfg);

// Forward-backward sweep with relaxed control updates. Non-convergence is
// reported through the bundle (converged=false), not an exception.
TrajectoryBundle fbsm_solve(const ExperientialState& x0, const PlannerModel& model,
                            const SolverConfig& cfg);

struct SteadyState {
    double x_star = 0.0;  // satisfaction level solving inflow = delta * x
    double mu_star = 0.0; // current-value shadow price w / (rho + delta)
};

// Analytic single-need steady state used as a solver oracle. The alignment
// efficiency is taken at its long-run limit (1 when the ideation cost decays,
// 1/(1+c0) otherwise). Requires delta > 0 and rho > 0.
SteadyState analytic_steady_state(const NeedParams& need, const IdeationParams& ip,
                                  const PipelineConfig& pipeline, double rho,
                                  double y_max);

// Discounted utility integral over a state path (trapezoid rule).
double discounted_utility_integral(const StatePath& states, const WeightVector& w,
                                   double rho);

// Cumulative form: value at grid point k is the integral over [0, t_k].
std::vector<double> running_discounted_utility(const StatePath& states,
                                               const WeightVector& w, double rho);

} // namespace alignlab
