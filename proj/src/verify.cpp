#include "alignlab/verify.hpp"

#include "alignlab/rng.hpp"

#include <algorithm>
#include <cmath>

namespace alignlab {

StatePath delivered_path(const StatePath& ideal, const ScenarioConfig& cfg) {
    StatePath out;
    out.times = ideal.times;
    out.values.resize(ideal.values.size());
    auto model = cfg.model();
    for (std::size_t k = 0; k < ideal.times.size(); ++k)
        out.values[k] = delivered_satisfaction(ideal.at(k), model.needs,
                                               cfg.ideation, cfg.pipeline.sat_max);
    return out;
}

double attainable_supremum(const ScenarioConfig& cfg) {
    double a_end = alignment_efficiency(cfg.ideation, cfg.solver.horizon);
    double sup = 0.0;
    for (const auto& n : cfg.needs) {
        if (!n.params.ethics_mask) continue;
        double cap = n.params.delta > 0.0
                         ? a_end * n.params.effectiveness *
                               share_value(cfg.pipeline, cfg.solver.y_max) /
                               n.params.delta
                         : cfg.pipeline.sat_max;
        sup += n.params.weight *
               std::min({cfg.pipeline.sat_max, n.params.desired, cap});
    }
    return sup;
}

namespace {

bool filter_matches(const std::string& filter, const std::string& name) {
    if (filter.empty()) return true;
    if (filter.front() == '=') return name == filter.substr(1);
    return name.find(filter) != std::string::npos;
}

// Hoelder bound on seeded random triples plus the solved trajectory pair.
CheckCertificate holder_certificate(const ScenarioConfig& cfg,
                                    const StatePath& ideal,
                                    const StatePath& delivered) {
    CheckCertificate cert;
    cert.name = "holder";
    cert.tolerance = kTolAbs;

    std::size_t n = cfg.dims();
    SplitMix64 rng(cfg.seed);
    int failures = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int draw = 0; draw < 1000; ++draw) {
        WeightVector w;
        ExperientialState x{0.0, {}}, xh{0.0, {}};
        for (std::size_t i = 0; i < n; ++i) {
            w.w.push_back(rng.uniform());
            x.sat.push_back(rng.uniform(0.0, cfg.pipeline.sat_max));
            xh.sat.push_back(rng.uniform(0.0, cfg.pipeline.sat_max));
        }
        auto r = utility_gap_bound(w, x, xh);
        worst = std::max(worst, r.gap - r.bound);
        if (!r.holds) ++failures;
    }

    WeightVector w = cfg.weights();
    for (std::size_t k = 0; k < ideal.times.size(); ++k) {
        auto r = utility_gap_bound(w, ideal.at(k),
                                   {ideal.times[k], delivered.values[k]});
        worst = std::max(worst, r.gap - r.bound);
        if (!r.holds) ++failures;
    }
    cert.witness.push_back({"random_draws", 1000.0});
    cert.witness.push_back({"violations", static_cast<double>(failures)});
    cert.witness.push_back({"max_violation", worst});
    cert.passed = failures == 0;
    if (!cert.passed) cert.notes = "weighted utility gap exceeded the l1 x sup bound";
    return cert;
}

} // namespace

VerifyOutcome run_verification(const ScenarioConfig& cfg,
                               const std::string& suite_filter) {
    VerifyOutcome out;
    auto model = cfg.model();
    out.bundle = fbsm_solve(cfg.initial_state(), model, cfg.solver);
    out.delivered = delivered_path(out.bundle.state_path, cfg);
    out.sup_gap = sup_gap_series(out.bundle.state_path, out.delivered);

    WeightVector w = cfg.weights();
    auto k = cfg.error_bounds();
    std::vector<CheckCertificate> certs;

    certs.push_back(check_asymptotic_optimality(out.bundle, model, cfg.solver));
    certs.push_back(check_bounded_error(out.bundle.state_path, out.delivered, k,
                                        cfg.ideation.lambda_decay));
    certs.push_back(check_convergence_rate(out.bundle.state_path.times, out.sup_gap,
                                           cfg.ideation.lambda_decay));
    certs.push_back(
        check_frontier_expansion(attainable_supremum(cfg), cfg.frontier_adds));

    {
        FrontierConfig fc = cfg.frontier.value_or(FrontierConfig{});
        FrontierState frontier;
        frontier.active_dims = static_cast<int>(cfg.dims());
        frontier.discovery_slope = fc.discovery_slope;
        certs.push_back(check_full_employment_value(frontier,
                                                    cfg.factors.labor_employed,
                                                    fc.new_weight, fc.new_attainable,
                                                    fc.step));
    }

    certs.push_back(holder_certificate(cfg, out.bundle.state_path, out.delivered));

    {
        // Roll back the largest-contribution dimension of the terminal state.
        std::size_t last = out.bundle.state_path.times.size() - 1;
        ExperientialState terminal{out.bundle.state_path.times[last],
                                   out.bundle.state_path.values[last]};
        std::size_t best = 0;
        for (std::size_t i = 0; i < w.dims(); ++i)
            if (w.w[i] * terminal.sat[i] > w.w[best] * terminal.sat[best]) best = i;
        std::vector<std::size_t> rollback{best};
        certs.push_back(check_irreversibility(terminal, w, rollback));
    }

    if (w.meaning_index) {
        certs.push_back(check_meaning_irreducibility(w, cfg.pipeline.sat_max));
    } else {
        CheckCertificate cert;
        cert.name = "meaning_irreducibility";
        cert.passed = true;
        cert.notes = "no meaning dimension designated: vacuous pass";
        certs.push_back(cert);
    }

    certs.push_back(check_unemployment_irrationality(
        cfg.factors, cfg.production, model.needs, cfg.initial_state(), cfg.ideation,
        cfg.pipeline, 0.0));

    certs.push_back(check_utility_convergence(w, out.bundle.state_path, out.delivered,
                                              cfg.pipeline.sat_max));

    std::sort(certs.begin(), certs.end(),
              [](const CheckCertificate& a, const CheckCertificate& b) {
                  return a.name < b.name;
              });
    out.all_passed = true;
    for (auto& cert : certs) {
        if (!filter_matches(suite_filter, cert.name)) continue;
        if (!cert.passed) out.all_passed = false;
        out.certificates.push_back(std::move(cert));
    }
    return out;
}

} // namespace alignlab
