#include "alignlab/theorems.hpp"

#include "alignlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace alignlab {

const double* CheckCertificate::find(const std::string& witness_name) const {
    for (const auto& w : witness)
        if (w.name == witness_name) return &w.value;
    return nullptr;
}

std::vector<double> sup_gap_series(const StatePath& ideal,
                                   const StatePath& delivered) {
    if (ideal.times.size() != delivered.times.size())
        throw DimensionMismatch("sup_gap_series: paths on different grids");
    std::vector<double> gap(ideal.times.size());
    for (std::size_t k = 0; k < gap.size(); ++k) {
        if (ideal.times[k] != delivered.times[k])
            throw DimensionMismatch("sup_gap_series: grid times differ");
        if (ideal.values[k].size() != delivered.values[k].size())
            throw DimensionMismatch("sup_gap_series: state widths differ");
        double worst = 0.0;
        for (std::size_t i = 0; i < ideal.values[k].size(); ++i)
            worst = std::max(worst,
                             std::fabs(ideal.values[k][i] - delivered.values[k][i]));
        gap[k] = worst;
    }
    return gap;
}

CheckCertificate check_bounded_error(const StatePath& ideal,
                                     const StatePath& delivered,
                                     std::span<const double> k, double lambda_decay,
                                     double tol) {
    CheckCertificate cert;
    cert.name = "bounded_error";
    cert.tolerance = tol;

    double k_star = 0.0;
    for (double ki : k) {
        if (!std::isfinite(ki)) throw InvalidInput("check_bounded_error: k not finite");
        k_star = std::max(k_star, ki);
    }
    auto gap = sup_gap_series(ideal, delivered);

    double worst = -std::numeric_limits<double>::infinity();
    double worst_t = 0.0;
    for (std::size_t i = 0; i < gap.size(); ++i) {
        double envelope = k_star * std::exp(-lambda_decay * ideal.times[i]);
        double violation = gap[i] - envelope;
        if (violation > worst) {
            worst = violation;
            worst_t = ideal.times[i];
        }
    }
    cert.witness.push_back({"max_violation", worst});
    cert.witness.push_back({"violation_time", worst_t});
    cert.witness.push_back({"k_star", k_star});
    cert.passed = worst <= tol;
    if (!cert.passed) {
        std::ostringstream os;
        os << "envelope exceeded at t=" << worst_t;
        cert.notes = os.str();
    }
    return cert;
}

CheckCertificate check_convergence_rate(std::span<const double> times,
                                        std::span<const double> errors,
                                        double lambda_decay) {
    if (times.size() != errors.size() || times.size() < 4)
        throw DimensionMismatch("check_convergence_rate: series malformed");

    CheckCertificate cert;
    cert.name = "convergence_rate";
    cert.tolerance = 0.05;

    if (!(lambda_decay > 0.0)) {
        cert.passed = false;
        cert.notes = "decay rate is not positive: nothing converges";
        cert.witness.push_back({"fitted_rate", 0.0});
        return cert;
    }

    // Fit on the tail (second half of the horizon); exact zeros truncate the
    // fit to the nonzero prefix.
    double t_half = times.front() + 0.5 * (times.back() - times.front());
    std::vector<double> ts, logs;
    bool hit_zero = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_half) continue;
        if (errors[i] < 0.0)
            throw InvalidInput("check_convergence_rate: negative error value");
        if (errors[i] == 0.0) {
            hit_zero = true;
            break;
        }
        ts.push_back(times[i]);
        logs.push_back(std::log(errors[i]));
    }
    if (ts.size() < 2) {
        cert.passed = false;
        cert.notes = "tail too short for a regression (zeros from the start?)";
        cert.witness.push_back({"fitted_rate", 0.0});
        return cert;
    }

    // Least squares slope of log(error) against t.
    double n = static_cast<double>(ts.size());
    double st = std::accumulate(ts.begin(), ts.end(), 0.0);
    double sl = std::accumulate(logs.begin(), logs.end(), 0.0);
    double stt = 0.0, stl = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += ts[i] * ts[i];
        stl += ts[i] * logs[i];
    }
    double slope = (n * stl - st * sl) / (n * stt - st * st);

    double rel_err = std::fabs(slope + lambda_decay) / lambda_decay;
    cert.witness.push_back({"fitted_rate", -slope});
    cert.witness.push_back({"relative_error", rel_err});
    bool slope_ok = rel_err <= 0.05;

    bool decade_ok = true;
    double span = times.back() - times.front();
    if (lambda_decay * span >= 4.0) {
        // Find first/last nonzero values for the decade drop assertion.
        double first = 0.0, last = 0.0;
        for (double e : errors)
            if (e > 0.0) {
                first = e;
                break;
            }
        for (std::size_t i = errors.size(); i-- > 0;)
            if (errors[i] > 0.0) {
                last = errors[i];
                break;
            }
        decade_ok = first > 0.0 && last < first / 10.0;
        cert.witness.push_back({"initial_error", first});
        cert.witness.push_back({"final_error", last});
    }

    cert.passed = slope_ok && decade_ok;
    if (hit_zero) cert.notes = "series reached exact zero; fitted the nonzero prefix";
    if (!slope_ok) cert.notes += (cert.notes.empty() ? "" : "; ") + std::string(
                       "fitted rate misses the decay rate by more than 5%");
    if (!decade_ok)
        cert.notes += (cert.notes.empty() ? "" : "; ") +
                      std::string("final error not below a tenth of the initial");
    return cert;
}

CheckCertificate check_utility_convergence(const WeightVector& w,
                                           const StatePath& ideal,
                                           const StatePath& delivered,
                                           double sat_max) {
    CheckCertificate cert;
    cert.name = "utility_convergence";
    double w1 = l1_norm(w);
    double tol_conv = 1e-3 * w1 * sat_max;
    cert.tolerance = tol_conv;

    auto gap = sup_gap_series(ideal, delivered);
    double worst_violation = -std::numeric_limits<double>::infinity();
    double tail_worst = 0.0;
    double t_tail = ideal.times.front() + 0.75 * (ideal.times.back() - ideal.times.front());
    for (std::size_t k = 0; k < gap.size(); ++k) {
        double ugap = std::fabs(utility(w, ideal.at(k)) -
                                utility(w, {ideal.times[k], delivered.values[k]}));
        worst_violation = std::max(worst_violation, ugap - w1 * gap[k]);
        if (ideal.times[k] >= t_tail) tail_worst = std::max(tail_worst, ugap);
    }
    cert.witness.push_back({"max_bound_violation", worst_violation});
    cert.witness.push_back({"tail_utility_gap", tail_worst});
    bool bound_ok = worst_violation <= kTolAbs;
    bool tail_ok = tail_worst <= tol_conv;
    cert.passed = bound_ok && tail_ok;
    if (!bound_ok) cert.notes = "utility gap exceeded the weighted sup-norm bound";
    if (!tail_ok)
        cert.notes += (cert.notes.empty() ? "" : "; ") +
                      std::string("tail utility gap above the convergence tolerance");
    return cert;
}

CheckCertificate check_asymptotic_optimality(const TrajectoryBundle& bundle,
                                             const PlannerModel& model,
                                             const SolverConfig& cfg,
                                             double tol_opt) {
    CheckCertificate cert;
    cert.name = "asymptotic_optimality";
    cert.tolerance = tol_opt;
    if (!bundle.converged) {
        cert.passed = false;
        cert.notes = "solver did not converge; no optimality claim possible";
        return cert;
    }

    double t_end = bundle.state_path.times.back();
    double a_end = alignment_efficiency(model.ideation, t_end);
    double attainable = 0.0;
    for (const auto& need : model.needs) {
        if (!need.ethics_mask) continue; // masked needs contribute nothing
        double cap = need.delta > 0.0
                         ? a_end * need.effectiveness *
                               share_value(model.pipeline, cfg.y_max) / need.delta
                         : model.pipeline.sat_max;
        double x_attain =
            std::min({model.pipeline.sat_max, need.desired, cap});
        attainable += need.weight * x_attain;
    }

    WeightVector w = model.weights();
    std::size_t last = bundle.state_path.times.size() - 1;
    double terminal = 0.0;
    for (std::size_t i = 0; i < model.needs.size(); ++i)
        if (model.needs[i].ethics_mask)
            terminal += w.w[i] * bundle.state_path.values[last][i];

    double shortfall = attainable > 0.0 ? (attainable - terminal) / attainable
                                        : std::fabs(terminal);
    cert.witness.push_back({"terminal_utility", terminal});
    cert.witness.push_back({"attainable_supremum", attainable});
    cert.witness.push_back({"relative_shortfall", shortfall});
    cert.passed = shortfall <= tol_opt && shortfall >= -tol_opt;
    if (!cert.passed) cert.notes = "terminal utility misses the attainable supremum";
    return cert;
}

CheckCertificate check_frontier_expansion(double base_supremum,
                                          std::span<const FrontierAdd> schedule) {
    CheckCertificate cert;
    cert.name = "frontier_expansion";
    cert.tolerance = 0.0;
    if (schedule.empty()) {
        cert.passed = true;
        cert.notes = "empty add schedule: vacuous pass";
        cert.witness.push_back({"events", 0.0});
        return cert;
    }

    double supremum = base_supremum;
    double min_increment = std::numeric_limits<double>::infinity();
    int non_expanding = 0;
    for (const auto& add : schedule) {
        if (add.weight < 0.0 || add.attainable < 0.0)
            throw InvalidInput("check_frontier_expansion: negative add event");
        double next = supremum + add.weight * add.attainable;
        double inc = next - supremum;
        min_increment = std::min(min_increment, inc);
        if (!(inc > 0.0)) ++non_expanding;
        supremum = next;
    }
    cert.witness.push_back({"events", static_cast<double>(schedule.size())});
    cert.witness.push_back({"min_increment", min_increment});
    cert.witness.push_back({"final_supremum", supremum});
    cert.passed = non_expanding == 0;
    if (!cert.passed) {
        std::ostringstream os;
        os << non_expanding << " add event(s) were non-expanding "
           << "(zero weight or zero attainable level)";
        cert.notes = os.str();
    }
    return cert;
}

CheckCertificate check_irreversibility(const ExperientialState& x,
                                       const WeightVector& w,
                                       std::span<const std::size_t> rollback) {
    if (rollback.empty())
        throw InvalidInput("check_irreversibility: empty rollback set");
    CheckCertificate cert;
    cert.name = "irreversibility";
    cert.tolerance = kTolAbs;

    double before = utility(w, x);
    double removed = 0.0;
    bool strict_premise = true;
    ExperientialState after = x;
    for (std::size_t i : rollback) {
        if (i >= x.dims())
            throw InvalidInput("check_irreversibility: rollback index out of range");
        if (!(w.w[i] * x.sat[i] > 0.0)) strict_premise = false;
        removed += w.w[i] * x.sat[i];
        after.sat[i] = 0.0;
    }
    double after_u = utility(w, after);
    double accounting_error = std::fabs(after_u - (before - removed));

    cert.witness.push_back({"utility_before", before});
    cert.witness.push_back({"utility_after", after_u});
    cert.witness.push_back({"removed_contribution", removed});
    cert.witness.push_back({"accounting_error", accounting_error});
    bool exact = accounting_error <= kTolAbs;
    bool strict_drop = after_u < before;
    cert.passed = exact && strict_drop && strict_premise;
    if (!strict_premise)
        cert.notes = "rollback set contains zero-contribution dimensions; "
                     "strict-decrease premise violated";
    else if (!strict_drop)
        cert.notes = "rollback did not strictly reduce utility";
    else if (!exact)
        cert.notes = "rollback accounting drifted beyond tolerance";
    return cert;
}

CheckCertificate check_meaning_irreducibility(const WeightVector& w, double sat_max) {
    CheckCertificate cert;
    cert.name = "meaning_irreducibility";
    cert.tolerance = kTolAbs;
    if (!w.meaning_index) {
        cert.passed = false;
        cert.notes = "no meaning dimension designated";
        return cert;
    }
    std::size_t m = *w.meaning_index;
    if (m >= w.dims()) throw InvalidInput("meaning index out of range");
    double w_m = w.w[m];
    double full = l1_norm(w) * sat_max;
    double suppressed = full - w_m * sat_max;
    cert.witness.push_back({"full_supremum", full});
    cert.witness.push_back({"suppressed_supremum", suppressed});
    cert.witness.push_back({"shortfall", w_m * sat_max});
    if (!(w_m > 0.0)) {
        cert.passed = false;
        cert.notes = "meaning weight is zero: the positive-weights premise fails "
                     "and the shortfall collapses";
        return cert;
    }
    cert.passed = suppressed < full &&
                  std::fabs((full - suppressed) - w_m * sat_max) <= kTolAbs;
    return cert;
}

std::optional<ParetoImprovement>
find_pareto_improvement(const FactorAllocation& factors, const ProductionParams& prod,
                        std::span<const NeedParams> needs, const ExperientialState& x,
                        const IdeationParams& ip, const PipelineConfig& pipeline,
                        double t) {
    if (x.dims() != needs.size())
        throw DimensionMismatch("find_pareto_improvement: state vs needs length");

    bool idle = factors.labor_idle > 0.0;
    bool unmet = false;
    for (std::size_t i = 0; i < needs.size(); ++i)
        if (needs[i].ethics_mask && x.sat[i] < needs[i].desired) unmet = true;
    if (!idle || !unmet) return std::nullopt;

    // Employ the idle pools and push the marginal output through the
    // pipeline for one unit of time.
    ParetoImprovement imp;
    imp.d_labor = factors.labor_idle;
    imp.d_capital = factors.capital_idle;
    FactorAllocation after = reallocate(factors, imp.d_labor, imp.d_capital);

    ProductionParams before_p = prod;
    before_p.capital = factors.capital_employed;
    before_p.labor = factors.labor_employed;
    ProductionParams after_p = prod;
    after_p.capital = after.capital_employed;
    after_p.labor = after.labor_employed;
    double marginal_output = cobb_douglas(after_p) - cobb_douglas(before_p);

    auto inflow = need_inflows_scalar(marginal_output, t, x, needs, ip, pipeline);
    imp.sat_after = x.sat;
    double delta_u = 0.0;
    for (std::size_t i = 0; i < needs.size(); ++i) {
        double cap = std::min(needs[i].desired, pipeline.sat_max);
        double next = std::min(x.sat[i] + inflow[i], std::max(cap, x.sat[i]));
        delta_u += needs[i].weight * (next - x.sat[i]);
        imp.sat_after[i] = next;
    }
    imp.delta_u = delta_u;
    return imp;
}

CheckCertificate check_unemployment_irrationality(
    const FactorAllocation& factors, const ProductionParams& prod,
    std::span<const NeedParams> needs, const ExperientialState& x,
    const IdeationParams& ip, const PipelineConfig& pipeline, double t) {
    CheckCertificate cert;
    cert.name = "unemployment_irrationality";
    cert.tolerance = 0.0;

    bool idle = factors.labor_idle > 0.0;
    bool unmet = false;
    for (std::size_t i = 0; i < needs.size(); ++i)
        if (needs[i].ethics_mask && x.sat[i] < needs[i].desired) unmet = true;

    auto imp = find_pareto_improvement(factors, prod, needs, x, ip, pipeline, t);
    cert.witness.push_back({"labor_idle", factors.labor_idle});
    cert.witness.push_back({"unmet_unmasked", unmet ? 1.0 : 0.0});

    if (!idle || !unmet) {
        cert.passed = !imp.has_value();
        cert.notes = cert.passed ? "premises fail; correctly no improvement reported"
                                 : "improvement reported although a premise fails";
        return cert;
    }
    if (!imp) {
        cert.passed = false;
        cert.notes = "premises hold but no improvement was found";
        return cert;
    }
    bool pareto = true;
    for (std::size_t i = 0; i < x.dims(); ++i)
        if (imp->sat_after[i] < x.sat[i]) pareto = false;
    cert.witness.push_back({"delta_u", imp->delta_u});
    cert.witness.push_back({"d_labor", imp->d_labor});
    cert.passed = imp->delta_u > 0.0 && pareto;
    if (!pareto)
        cert.notes = "reallocation lowered a satisfaction level";
    else if (!(imp->delta_u > 0.0))
        cert.notes = "reallocation produced no strict utility gain";
    return cert;
}

double discovery_delta_u(const FrontierState& frontier, double labor_hours,
                         double w_new, double attainable, double dt) {
    if (frontier.discovery_slope < 0.0)
        throw InvalidParameter("discovery slope must be non-negative");
    if (!(dt > 0.0)) throw InvalidParameter("discovery step must be positive");
    double discovered = frontier.discovery_slope * labor_hours * dt;
    return discovered * w_new * attainable;
}

FrontierState advance_frontier(const FrontierState& frontier, double labor_hours,
                               double dt) {
    if (frontier.discovery_slope < 0.0)
        throw InvalidParameter("discovery slope must be non-negative");
    FrontierState next = frontier;
    next.beyond_measure += frontier.discovery_slope * labor_hours * dt;
    // Whole units of discovered measure convert into concrete dimensions.
    while (next.beyond_measure >= 1.0) {
        next.beyond_measure -= 1.0;
        ++next.active_dims;
    }
    return next;
}

CheckCertificate check_full_employment_value(const FrontierState& frontier,
                                             double labor_hours, double w_new,
                                             double attainable, double dt) {
    CheckCertificate cert;
    cert.name = "full_employment_value";
    cert.tolerance = 0.0;

    double with_labor = discovery_delta_u(frontier, labor_hours, w_new, attainable, dt);
    double without = discovery_delta_u(frontier, 0.0, w_new, attainable, dt);
    cert.witness.push_back({"delta_u", with_labor});
    cert.witness.push_back({"delta_u_no_labor", without});

    bool zero_ok = without == 0.0;
    bool positive_ok = true;
    if (labor_hours > 0.0 && frontier.discovery_slope > 0.0 && w_new > 0.0)
        positive_ok = with_labor > 0.0;
    cert.passed = zero_ok && positive_ok;
    if (!zero_ok) cert.notes = "idle discovery produced a nonzero utility change";
    if (!positive_ok)
        cert.notes += (cert.notes.empty() ? "" : "; ") +
                      std::string("positive labor produced no utility gain "
                                  "(attainable level zero?)");
    return cert;
}

} // namespace alignlab
