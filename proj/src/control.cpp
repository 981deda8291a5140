#include "alignlab/control.hpp"

#include "alignlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace alignlab {

const char* to_string(CostateMode m) {
    switch (m) {
    case CostateMode::present_value: return "present_value";
    case CostateMode::current_value: return "current_value";
    case CostateMode::paper_literal: return "paper_literal";
    }
    return "?";
}

const char* to_string(ControlMode m) {
    return m == ControlMode::scalar_bounded ? "scalar_bounded" : "allocation_simplex";
}

const char* to_string(ShareMode m) {
    return m == ShareMode::saturating ? "saturating" : "linear";
}

std::vector<double> make_grid(const SolverConfig& cfg) {
    if (!(cfg.horizon > 0.0)) throw InvalidParameter("make_grid: horizon must be > 0");
    if (cfg.steps < 2) throw InvalidParameter("make_grid: need at least 2 grid steps");
    std::vector<double> t(static_cast<std::size_t>(cfg.steps) + 1);
    double dt = cfg.horizon / cfg.steps;
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = dt * static_cast<double>(k);
    t.back() = cfg.horizon;
    return t;
}

namespace {

// Resolves a control value to a per-need allocation vector.
std::vector<double> resolve_allocation(const ExperientialState& x,
                                       std::span<const double> control,
                                       ControlMode mode, const PlannerModel& model) {
    if (mode == ControlMode::scalar_bounded) {
        if (control.size() != 1)
            throw DimensionMismatch("scalar control must carry exactly one value");
        auto pass = admissible_needs(x, model.needs);
        return split_by_weight(control[0], pass, model.needs);
    }
    if (control.size() != model.needs.size())
        throw DimensionMismatch("allocation control length vs needs");
    return {control.begin(), control.end()};
}

} // namespace

std::vector<double> state_rhs(const ExperientialState& x,
                              std::span<const double> control, ControlMode mode,
                              double t, const PlannerModel& model) {
    if (x.dims() != model.needs.size())
        throw DimensionMismatch("state_rhs: state vs needs length");
    auto alloc = resolve_allocation(x, control, mode, model);
    auto inflow = need_inflows(alloc, t, x, model.needs, model.ideation, model.pipeline);
    std::vector<double> rate(x.dims());
    for (std::size_t i = 0; i < x.dims(); ++i)
        rate[i] = inflow[i] - model.needs[i].delta * x.sat[i];
    return rate;
}

std::vector<double> costate_to_present_value(std::span<const double> value,
                                             CostateMode mode, double t, double rho) {
    std::vector<double> out(value.begin(), value.end());
    switch (mode) {
    case CostateMode::present_value: return out;
    case CostateMode::current_value: {
        double scale = std::exp(-rho * t);
        for (double& v : out) v *= scale;
        return out;
    }
    case CostateMode::paper_literal:
        throw ContractViolation(
            "paper_literal costates have no exact present-value counterpart");
    }
    throw ContractViolation("unknown costate mode");
}

double hamiltonian(const ExperientialState& x, std::span<const double> control,
                   ControlMode cmode, std::span<const double> costate,
                   CostateMode costate_mode, double t, const PlannerModel& model,
                   const SolverConfig& cfg) {
    if (costate_mode != CostateMode::present_value)
        throw ContractViolation("hamiltonian requires a present_value costate; "
                                "transform with costate_to_present_value first");
    if (costate.size() != model.needs.size())
        throw DimensionMismatch("hamiltonian: costate vs needs length");
    WeightVector w = model.weights();
    double h = std::exp(-cfg.rho * t) * utility(w, x);
    auto rate = state_rhs(x, control, cmode, t, model);
    for (std::size_t i = 0; i < rate.size(); ++i) h += costate[i] * rate[i];
    return h;
}

std::vector<double> costate_rhs(std::span<const double> costate, CostateMode mode,
                                double t, const PlannerModel& model,
                                const SolverConfig& cfg) {
    if (costate.size() != model.needs.size())
        throw DimensionMismatch("costate_rhs: costate vs needs length");
    std::vector<double> rate(costate.size());
    switch (mode) {
    case CostateMode::present_value: {
        double disc = std::exp(-cfg.rho * t);
        for (std::size_t i = 0; i < costate.size(); ++i)
            rate[i] = -disc * model.needs[i].weight +
                      model.needs[i].delta * costate[i];
        return rate;
    }
    case CostateMode::current_value:
        for (std::size_t i = 0; i < costate.size(); ++i)
            rate[i] = (cfg.rho + model.needs[i].delta) * costate[i] -
                      model.needs[i].weight;
        return rate;
    case CostateMode::paper_literal: {
        // Verbatim printed form: keeps both the rho*lambda drift and the
        // discounted marginal utility, which matches neither convention.
        double disc = std::exp(-cfg.rho * t);
        for (std::size_t i = 0; i < costate.size(); ++i)
            rate[i] = cfg.rho * costate[i] - disc * model.needs[i].weight +
                      model.needs[i].delta * costate[i];
        return rate;
    }
    }
    throw ContractViolation("unknown costate mode");
}

ControlGradient dh_dcontrol(const ExperientialState& x,
                            std::span<const double> control, ControlMode cmode,
                            std::span<const double> costate, double t,
                            const PlannerModel& model) {
    if (costate.size() != model.needs.size())
        throw DimensionMismatch("dh_dcontrol: costate vs needs length");
    auto pass = admissible_needs(x, model.needs);
    double a = alignment_efficiency(model.ideation, t);

    ControlGradient g;
    g.is_linear = model.pipeline.share == ShareMode::linear;

    if (cmode == ControlMode::scalar_bounded) {
        if (control.size() != 1)
            throw DimensionMismatch("scalar control must carry exactly one value");
        // inflow_i = a phi_i s(f_i Y) with f_i the weight fraction, so
        // dH/dY = sum_i costate_i a phi_i s'(f_i Y) f_i.
        auto alloc = split_by_weight(control[0], pass, model.needs);
        double gsum = 0.0;
        double y = control[0];
        for (std::size_t i = 0; i < model.needs.size(); ++i) {
            if (!pass[i]) continue;
            double frac = y > 0.0 ? alloc[i] / y
                                  : split_by_weight(1.0, pass, model.needs)[i];
            gsum += costate[i] * a * model.needs[i].effectiveness *
                    share_derivative(model.pipeline, alloc[i]) * frac;
        }
        g.d = {gsum};
        return g;
    }

    if (control.size() != model.needs.size())
        throw DimensionMismatch("allocation control length vs needs");
    g.d.assign(model.needs.size(), 0.0);
    for (std::size_t i = 0; i < model.needs.size(); ++i) {
        if (!pass[i]) continue;
        g.d[i] = costate[i] * a * model.needs[i].effectiveness *
                 share_derivative(model.pipeline, control[i]);
    }
    return g;
}

namespace {

// Control-dependent part of the Hamiltonian, sum_i costate_i * inflow_i.
double control_objective(const ExperientialState& x, std::span<const double> control,
                         ControlMode cmode, std::span<const double> costate, double t,
                         const PlannerModel& model) {
    auto alloc = resolve_allocation(x, control, cmode, model);
    auto inflow = need_inflows(alloc, t, x, model.needs, model.ideation,
                               model.pipeline);
    double v = 0.0;
    for (std::size_t i = 0; i < inflow.size(); ++i) v += costate[i] * inflow[i];
    return v;
}

std::vector<double> waterfill_allocation(const ExperientialState& x,
                                         std::span<const double> costate, double t,
                                         const PlannerModel& model,
                                         const SolverConfig& cfg) {
    auto pass = admissible_needs(x, model.needs);
    double a = alignment_efficiency(model.ideation, t);
    double eta = model.pipeline.eta;

    // Marginal value of the first allocated unit for each candidate need.
    struct Candidate {
        std::size_t index;
        double log_gain; // ln(costate * a * phi * eta)
    };
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < model.needs.size(); ++i) {
        if (!pass[i]) continue;
        double gain = costate[i] * a * model.needs[i].effectiveness * eta;
        if (gain <= 0.0) continue;
        cands.push_back({i, std::log(gain)});
    }
    std::vector<double> alloc(model.needs.size(), 0.0);
    if (cands.empty()) return alloc; // all shadow prices <= 0: produce nothing

    if (model.pipeline.share == ShareMode::linear) {
        // Constant marginals: the whole budget goes to the top-value needs,
        // split evenly across exact ties.
        double best = cands[0].log_gain;
        for (const auto& c : cands) best = std::max(best, c.log_gain);
        std::vector<std::size_t> top;
        for (const auto& c : cands)
            if (c.log_gain == best) top.push_back(c.index);
        for (std::size_t i : top)
            alloc[i] = cfg.y_max / static_cast<double>(top.size());
        return alloc;
    }

    // Saturating share: equalise marginals. With s(y) = 1 - exp(-eta y) the
    // marginal of need i at allocation y is gain_i * exp(-eta y); the KKT
    // level nu gives y_i = (ln gain_i - ln nu) / eta on the supported set.
    std::sort(cands.begin(), cands.end(), [](const Candidate& l, const Candidate& r) {
        return l.log_gain > r.log_gain ||
               (l.log_gain == r.log_gain && l.index < r.index);
    });
    std::size_t support = cands.size();
    double log_nu = 0.0;
    double prefix = 0.0;
    for (std::size_t k = 0; k < cands.size(); ++k) {
        prefix += cands[k].log_gain;
        double level = (prefix - eta * cfg.y_max) / static_cast<double>(k + 1);
        if (k + 1 == cands.size() || level >= cands[k + 1].log_gain) {
            support = k + 1;
            log_nu = level;
            break;
        }
    }
    for (std::size_t k = 0; k < support; ++k) {
        double y = (cands[k].log_gain - log_nu) / eta;
        alloc[cands[k].index] = std::max(0.0, y);
    }
    return alloc;
}

double maximize_scalar(const ExperientialState& x, std::span<const double> costate,
                       double t, const PlannerModel& model, const SolverConfig& cfg) {
    auto objective = [&](double y) {
        double v = y;
        return control_objective(x, std::span<const double>(&v, 1),
                                 ControlMode::scalar_bounded, costate, t, model);
    };
    auto gradient = [&](double y) {
        double v = y;
        return dh_dcontrol(x, std::span<const double>(&v, 1),
                           ControlMode::scalar_bounded, costate, t, model)
            .d[0];
    };

    double lo = 0.0, hi = cfg.y_max;
    double glo = gradient(lo), ghi = gradient(hi);
    std::vector<double> candidates{lo, hi};
    if (glo > 0.0 && ghi < 0.0) {
        // Interior stationary point: bisect the gradient sign change.
        for (int it = 0; it < 200 && hi - lo > 1e-14 * cfg.y_max; ++it) {
            double mid = 0.5 * (lo + hi);
            (gradient(mid) > 0.0 ? lo : hi) = mid;
        }
        candidates.push_back(0.5 * (lo + hi));
    }
    double best = candidates[0];
    double best_v = objective(best);
    for (double c : candidates) {
        double v = objective(c);
        if (v > best_v) {
            best_v = v;
            best = c;
        }
    }
    return best;
}

} // namespace

std::vector<double> maximize_hamiltonian(const ExperientialState& x,
                                         std::span<const double> costate, double t,
                                         const PlannerModel& model,
                                         const SolverConfig& cfg) {
    if (costate.size() != model.needs.size())
        throw DimensionMismatch("maximize_hamiltonian: costate vs needs length");
    for (double c : costate)
        if (!std::isfinite(c))
            throw InvalidInput("maximize_hamiltonian: non-finite costate");

    if (cfg.control_mode == ControlMode::allocation_simplex)
        return waterfill_allocation(x, costate, t, model, cfg);

    bool any_positive = false;
    auto pass = admissible_needs(x, model.needs);
    for (std::size_t i = 0; i < costate.size(); ++i)
        if (pass[i] && costate[i] > 0.0) any_positive = true;
    if (!any_positive) return {0.0};
    return {maximize_scalar(x, costate, t, model, cfg)};
}

StatePath integrate_forward(const ExperientialState& x0, const ControlPath& control,
                            const PlannerModel& model,
                            [[maybe_unused]] const SolverConfig& cfg,
                            long* clamp_events) {
    if (x0.dims() != model.needs.size())
        throw DimensionMismatch("integrate_forward: x0 vs needs length");
    const auto& times = control.times;
    if (times.size() < 2 || control.values.size() != times.size())
        throw InvalidInput("integrate_forward: control path grid malformed");

    StatePath path;
    path.times = times;
    path.values.resize(times.size());
    path.values[0] = x0.sat;
    long clamps = 0;
    double sat_max = model.pipeline.sat_max;

    auto rhs = [&](double t, const std::vector<double>& sat,
                   const std::vector<double>& ctrl) {
        ExperientialState xs{t, sat};
        return state_rhs(xs, ctrl, control.mode, t, model);
    };

    std::vector<double> mid(control.values[0].size());
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        double h = times[k + 1] - times[k];
        const auto& c0 = control.values[k];
        const auto& c1 = control.values[k + 1];
        for (std::size_t j = 0; j < mid.size(); ++j) mid[j] = 0.5 * (c0[j] + c1[j]);

        const auto& x = path.values[k];
        auto k1 = rhs(times[k], x, c0);
        std::vector<double> tmp(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        auto k2 = rhs(times[k] + 0.5 * h, tmp, mid);
        for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        auto k3 = rhs(times[k] + 0.5 * h, tmp, mid);
        for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + h * k3[i];
        auto k4 = rhs(times[k + 1], tmp, c1);

        std::vector<double> next(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            next[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(next[i]))
                throw IntegrationFailure("state became non-finite", k + 1);
            double clamped = std::clamp(next[i], 0.0, sat_max);
            if (clamped != next[i]) ++clamps;
            next[i] = clamped;
        }
        path.values[k + 1] = std::move(next);
    }
    if (clamp_events) *clamp_events = clamps;
    return path;
}

CostatePath integrate_backward(std::span<const double> terminal_costate,
                               const StatePath& states, const PlannerModel& model,
                               const SolverConfig& cfg) {
    if (terminal_costate.size() != model.needs.size())
        throw DimensionMismatch("integrate_backward: terminal condition length");
    const auto& times = states.times;
    if (times.size() < 2)
        throw InvalidInput("integrate_backward: state path grid malformed");

    CostatePath path;
    path.times = times;
    path.mode = cfg.costate_mode;
    path.values.resize(times.size());
    path.values.back().assign(terminal_costate.begin(), terminal_costate.end());

    auto rhs = [&](double t, const std::vector<double>& v) {
        return costate_rhs(v, cfg.costate_mode, t, model, cfg);
    };

    for (std::size_t k = times.size() - 1; k > 0; --k) {
        double h = times[k - 1] - times[k]; // negative: integrating backward
        const auto& v = path.values[k];
        auto k1 = rhs(times[k], v);
        std::vector<double> tmp(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) tmp[i] = v[i] + 0.5 * h * k1[i];
        auto k2 = rhs(times[k] + 0.5 * h, tmp);
        for (std::size_t i = 0; i < v.size(); ++i) tmp[i] = v[i] + 0.5 * h * k2[i];
        auto k3 = rhs(times[k] + 0.5 * h, tmp);
        for (std::size_t i = 0; i < v.size(); ++i) tmp[i] = v[i] + h * k3[i];
        auto k4 = rhs(times[k - 1], tmp);

        std::vector<double> prev(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            prev[i] = v[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(prev[i]))
                throw IntegrationFailure("costate became non-finite", k - 1);
        }
        path.values[k - 1] = std::move(prev);
    }
    return path;
}

std::vector<double> running_discounted_utility(const StatePath& states,
                                               const WeightVector& w, double rho) {
    std::vector<double> running(states.times.size(), 0.0);
    for (std::size_t k = 0; k + 1 < states.times.size(); ++k) {
        double f0 = std::exp(-rho * states.times[k]) *
                    utility(w, {states.times[k], states.values[k]});
        double f1 = std::exp(-rho * states.times[k + 1]) *
                    utility(w, {states.times[k + 1], states.values[k + 1]});
        running[k + 1] =
            running[k] + 0.5 * (f0 + f1) * (states.times[k + 1] - states.times[k]);
    }
    return running;
}

double discounted_utility_integral(const StatePath& states, const WeightVector& w,
                                   double rho) {
    return running_discounted_utility(states, w, rho).back();
}

namespace {

// Projected-gradient stationarity residual at one grid point, in
// current-value scale so the measure does not shrink with exp(-rho t).
double stationarity_residual(const ExperientialState& x,
                             const std::vector<double>& control,
                             const std::vector<double>& costate, double t,
                             const PlannerModel& model, const SolverConfig& cfg) {
    std::vector<double> cv = costate;
    if (cfg.costate_mode == CostateMode::present_value) {
        double scale = std::exp(cfg.rho * t);
        for (double& v : cv) v *= scale;
    }
    auto grad = dh_dcontrol(x, control, cfg.control_mode, cv, t, model);

    if (cfg.control_mode == ControlMode::scalar_bounded) {
        double y = control[0], g = grad.d[0];
        double eps = 1e-12 * cfg.y_max;
        if (y <= eps) return std::max(0.0, g);       // at 0: must not want more
        if (y >= cfg.y_max - eps) return std::max(0.0, -g); // at cap: wants more
        return std::fabs(g);
    }

    // Allocation mode: marginals of supported needs must sit on one level and
    // unsupported admissible needs must not beat it.
    double eps = 1e-12 * cfg.y_max;
    double level = 0.0;
    int supported = 0;
    for (std::size_t i = 0; i < control.size(); ++i) {
        if (control[i] > eps) {
            level += grad.d[i];
            ++supported;
        }
    }
    if (supported == 0) {
        double worst = 0.0;
        for (double g : grad.d) worst = std::max(worst, g);
        return worst;
    }
    level /= supported;
    double residual = 0.0;
    for (std::size_t i = 0; i < control.size(); ++i) {
        if (control[i] > eps)
            residual = std::max(residual, std::fabs(grad.d[i] - level));
        else
            residual = std::max(residual, std::max(0.0, grad.d[i] - level));
    }
    return residual;
}

} // namespace

TrajectoryBundle fbsm_solve(const ExperientialState& x0, const PlannerModel& model,
                            const SolverConfig& cfg) {
    if (!(cfg.rho > 0.0)) throw InvalidParameter("fbsm_solve: rho must be > 0");
    if (!(cfg.relaxation > 0.0) || cfg.relaxation > 1.0)
        throw InvalidParameter("fbsm_solve: relaxation outside (0,1]");
    if (!(cfg.y_max > 0.0)) throw InvalidParameter("fbsm_solve: y_max must be > 0");

    auto times = make_grid(cfg);
    std::size_t n = times.size();
    std::size_t width =
        cfg.control_mode == ControlMode::scalar_bounded ? 1 : model.needs.size();

    TrajectoryBundle bundle;
    bundle.control_path.times = times;
    bundle.control_path.mode = cfg.control_mode;
    bundle.control_path.values.assign(n, std::vector<double>(width, 0.0));

    WeightVector w = model.weights();
    std::vector<double> terminal(model.needs.size(), 0.0);

    double change = 0.0;
    bool converged = false;
    int iter = 0;
    while (iter < cfg.max_iter) {
        ++iter;
        long clamps = 0;
        auto states = integrate_forward(x0, bundle.control_path, model, cfg, &clamps);
        auto costates = integrate_backward(terminal, states, model, cfg);
        bundle.utility_per_iteration.push_back(
            discounted_utility_integral(states, w, cfg.rho));

        change = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            auto fresh = maximize_hamiltonian(states.at(k), costates.values[k],
                                              times[k], model, cfg);
            auto& held = bundle.control_path.values[k];
            for (std::size_t j = 0; j < width; ++j) {
                double next = cfg.relaxation * fresh[j] +
                              (1.0 - cfg.relaxation) * held[j];
                change = std::max(change, std::fabs(next - held[j]));
                held[j] = next;
            }
        }
        if (change < cfg.tol) {
            converged = true;
            break;
        }
    }

    // Final pass so the reported paths are consistent with the final control.
    bundle.clamp_events = 0;
    bundle.state_path =
        integrate_forward(x0, bundle.control_path, model, cfg, &bundle.clamp_events);
    bundle.costate_path = integrate_backward(terminal, bundle.state_path, model, cfg);
    bundle.running_utility = running_discounted_utility(bundle.state_path, w, cfg.rho);
    bundle.utility_integral = bundle.running_utility.back();
    bundle.hamiltonian_residual.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        bundle.hamiltonian_residual[k] = stationarity_residual(
            bundle.state_path.at(k), bundle.control_path.values[k],
            bundle.costate_path.values[k], times[k], model, cfg);
    bundle.iterations = iter;
    bundle.converged = converged;
    return bundle;
}

SteadyState analytic_steady_state(const NeedParams& need, const IdeationParams& ip,
                                  const PipelineConfig& pipeline, double rho,
                                  double y_max) {
    if (!(need.delta > 0.0))
        throw InvalidParameter("analytic_steady_state: no steady state for delta=0");
    if (!(rho > 0.0))
        throw InvalidParameter("analytic_steady_state: rho must be > 0");
    SteadyState s;
    s.mu_star = need.weight / (rho + need.delta);
    if (need.weight == 0.0) return s; // zero shadow price: zero control, x* = 0
    double a_limit = ip.lambda_decay > 0.0 ? 1.0 : 1.0 / (1.0 + ip.c0);
    double inflow = a_limit * need.effectiveness * share_value(pipeline, y_max);
    s.x_star = inflow / need.delta;
    return s;
}

} // namespace alignlab
