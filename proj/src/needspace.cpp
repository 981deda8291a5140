#include "alignlab/needspace.hpp"

#include "alignlab/errors.hpp"

#include <cmath>
#include <string>

namespace alignlab {

double sup_norm(std::span<const double> v) {
    if (v.empty()) throw InvalidInput("sup_norm of an empty vector");
    double best = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) throw InvalidInput("sup_norm over non-finite entries");
        double a = std::fabs(x);
        if (a > best) best = a;
    }
    return best;
}

double l1_norm(const WeightVector& w) {
    double s = 0.0;
    for (double wi : w.w) s += wi;
    return s;
}

double utility(const WeightVector& w, const ExperientialState& x) {
    if (w.dims() != x.dims())
        throw DimensionMismatch("utility: " + std::to_string(w.dims()) +
                                " weights vs " + std::to_string(x.dims()) + " sats");
    double u = 0.0;
    for (std::size_t i = 0; i < w.dims(); ++i) u += w.w[i] * x.sat[i];
    return u;
}

UtilityGapBound utility_gap_bound(const WeightVector& w, const ExperientialState& x,
                                  const ExperientialState& xhat, double tol_abs) {
    if (x.dims() != xhat.dims() || w.dims() != x.dims())
        throw DimensionMismatch("utility_gap_bound: mismatched lengths");
    if (x.time != xhat.time)
        throw InvalidInput("utility_gap_bound: states carry different timestamps");

    UtilityGapBound r;
    r.gap = std::fabs(utility(w, x) - utility(w, xhat));
    double sup = 0.0;
    for (std::size_t i = 0; i < x.dims(); ++i) {
        double d = std::fabs(x.sat[i] - xhat.sat[i]);
        if (d > sup) sup = d;
    }
    r.bound = l1_norm(w) * sup;
    r.holds = r.gap <= r.bound + tol_abs;
    return r;
}

std::pair<ExperientialState, WeightVector>
extend_dimensions(const ExperientialState& x, const WeightVector& w,
                  const std::vector<std::pair<double, double>>& new_needs,
                  double sat_max) {
    if (w.dims() != x.dims())
        throw DimensionMismatch("extend_dimensions: mismatched lengths");
    ExperientialState x2 = x;
    WeightVector w2 = w;
    for (const auto& [weight, sat] : new_needs) {
        if (weight < 0.0)
            throw InvalidInput("extend_dimensions: negative weight");
        if (sat < 0.0 || sat > sat_max)
            throw InvalidInput("extend_dimensions: satisfaction outside [0, sat_max]");
        w2.w.push_back(weight);
        x2.sat.push_back(sat);
    }
    return {std::move(x2), std::move(w2)};
}

std::pair<ExperientialState, WeightVector>
truncate_dimensions(const ExperientialState& x, const WeightVector& w,
                    std::size_t count) {
    if (w.dims() != x.dims())
        throw DimensionMismatch("truncate_dimensions: mismatched lengths");
    if (count > x.dims())
        throw InvalidInput("truncate_dimensions: removing more dimensions than exist");
    ExperientialState x2 = x;
    WeightVector w2 = w;
    x2.sat.resize(x.dims() - count);
    w2.w.resize(w.dims() - count);
    if (w2.meaning_index && *w2.meaning_index >= w2.dims()) w2.meaning_index.reset();
    return {std::move(x2), std::move(w2)};
}

} // namespace alignlab
