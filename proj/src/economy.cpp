#include "alignlab/economy.hpp"

#include "alignlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace alignlab {

double cobb_douglas(const ProductionParams& p) {
    if (!(p.alpha > 0.0) || !(p.alpha < 1.0))
        throw InvalidParameter("cobb_douglas: alpha outside (0,1)");
    if (!(p.tfp > 0.0)) throw InvalidParameter("cobb_douglas: tfp must be positive");
    if (p.capital < 0.0 || p.labor < 0.0)
        throw InvalidParameter("cobb_douglas: negative factor input");
    if (p.capital == 0.0 || p.labor == 0.0) return 0.0;
    return p.tfp * std::pow(p.capital, p.alpha) * std::pow(p.labor, 1.0 - p.alpha);
}

double ideation_cost(const IdeationParams& ip, double t) {
    if (t < 0.0) throw InvalidInput("ideation_cost: negative time");
    return ip.c0 * std::exp(-ip.lambda_decay * t);
}

double alignment_efficiency(const IdeationParams& ip, double t) {
    return 1.0 / (1.0 + ideation_cost(ip, t));
}

double share_value(const PipelineConfig& cfg, double y) {
    return cfg.share == ShareMode::saturating ? 1.0 - std::exp(-cfg.eta * y)
                                              : cfg.eta * y;
}

double share_derivative(const PipelineConfig& cfg, double y) {
    return cfg.share == ShareMode::saturating ? cfg.eta * std::exp(-cfg.eta * y)
                                              : cfg.eta;
}

std::vector<double> demand_gaps(const ExperientialState& x,
                                std::span<const NeedParams> needs) {
    if (x.dims() != needs.size())
        throw DimensionMismatch("demand_gaps: state vs needs length");
    std::vector<double> gaps(needs.size());
    for (std::size_t i = 0; i < needs.size(); ++i)
        gaps[i] = std::max(0.0, needs[i].desired - x.sat[i]);
    return gaps;
}

std::vector<char> admissible_needs(const ExperientialState& x,
                                   std::span<const NeedParams> needs) {
    auto gaps = demand_gaps(x, needs);
    std::vector<char> pass(needs.size());
    for (std::size_t i = 0; i < needs.size(); ++i)
        pass[i] = needs[i].ethics_mask && gaps[i] > 0.0;
    return pass;
}

std::vector<double> split_by_weight(double total, std::span<const char> admissible,
                                    std::span<const NeedParams> needs) {
    if (admissible.size() != needs.size())
        throw DimensionMismatch("split_by_weight: mask vs needs length");
    std::vector<double> alloc(needs.size(), 0.0);
    double weight_sum = 0.0;
    std::size_t n_admissible = 0;
    for (std::size_t i = 0; i < needs.size(); ++i) {
        if (!admissible[i]) continue;
        weight_sum += needs[i].weight;
        ++n_admissible;
    }
    if (n_admissible == 0) return alloc;
    for (std::size_t i = 0; i < needs.size(); ++i) {
        if (!admissible[i]) continue;
        alloc[i] = weight_sum > 0.0
                       ? total * needs[i].weight / weight_sum
                       : total / static_cast<double>(n_admissible);
    }
    return alloc;
}

std::vector<double> need_inflows(std::span<const double> allocation, double t,
                                 const ExperientialState& x,
                                 std::span<const NeedParams> needs,
                                 const IdeationParams& ip,
                                 const PipelineConfig& cfg) {
    if (allocation.size() != needs.size() || x.dims() != needs.size())
        throw DimensionMismatch("need_inflows: allocation/state/needs lengths");
    auto pass = admissible_needs(x, needs);
    double a = alignment_efficiency(ip, t);
    std::vector<double> inflow(needs.size(), 0.0);
    for (std::size_t i = 0; i < needs.size(); ++i) {
        if (!pass[i]) continue;
        if (allocation[i] < 0.0)
            throw InvalidInput("need_inflows: negative allocation component");
        inflow[i] = a * needs[i].effectiveness * share_value(cfg, allocation[i]);
    }
    return inflow;
}

std::vector<double> need_inflows_scalar(double output, double t,
                                        const ExperientialState& x,
                                        std::span<const NeedParams> needs,
                                        const IdeationParams& ip,
                                        const PipelineConfig& cfg) {
    if (output < 0.0) throw InvalidInput("need_inflows_scalar: negative output");
    auto pass = admissible_needs(x, needs);
    auto alloc = split_by_weight(output, pass, needs);
    return need_inflows(alloc, t, x, needs, ip, cfg);
}

FactorAllocation reallocate(const FactorAllocation& f, double d_labor,
                            double d_capital) {
    if (d_labor < 0.0 || d_labor > f.labor_idle)
        throw InvalidInput("reallocate: labor draw exceeds idle pool");
    if (d_capital < 0.0 || d_capital > f.capital_idle)
        throw InvalidInput("reallocate: capital draw exceeds idle pool");
    FactorAllocation g = f;
    g.labor_employed += d_labor;
    g.labor_idle -= d_labor;
    g.capital_employed += d_capital;
    g.capital_idle -= d_capital;
    return g;
}

std::vector<double> delivered_satisfaction(const ExperientialState& x,
                                           std::span<const NeedParams> needs,
                                           const IdeationParams& ip,
                                           double sat_max) {
    if (x.dims() != needs.size())
        throw DimensionMismatch("delivered_satisfaction: state vs needs length");
    double shortfall = 1.0 - alignment_efficiency(ip, x.time);
    std::vector<double> delivered(needs.size());
    for (std::size_t i = 0; i < needs.size(); ++i) {
        double d = x.sat[i] * (1.0 - needs[i].effectiveness * shortfall);
        delivered[i] = std::clamp(d, 0.0, sat_max);
    }
    return delivered;
}

double default_error_bound(const NeedParams& need, const IdeationParams& ip,
                           double sat_max) {
    return ip.c0 * need.effectiveness * sat_max;
}

} // namespace alignlab
