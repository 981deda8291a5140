#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace alignlab {

// Truncated satisfaction vector with its timestamp. Entries live in
// [0, sat_max] (sat_max is scenario-level, default 1).
struct ExperientialState {
    double time = 0.0;
    std::vector<double> sat;

    std::size_t dims() const { return sat.size(); }
};

// Non-negative importance weights over the need dimensions. meaning_index,
// when set, marks the dimension carrying existential meaning; its weight must
// be strictly positive (validated by the scenario layer).
struct WeightVector {
    std::vector<double> w;
    std::optional<std::size_t> meaning_index;

    std::size_t dims() const { return w.size(); }
};

struct UtilityGapBound {
    double gap = 0.0;   // |U(w,x) - U(w,xhat)|
    double bound = 0.0; // ||w||_1 * sup-norm of (x - xhat)
    bool holds = false; // gap <= bound + tol_abs
};

// Default comparison tolerances used across the project unless a check pins
// its own.
inline constexpr double kTolAbs = 1e-12;
inline constexpr double kTolRel = 1e-9;

inline bool nearly_equal(double a, double b, double abs_tol = kTolAbs,
                         double rel_tol = kTolRel) {
    double diff = a > b ? a - b : b - a;
    double mag = a < 0 ? -a : a;
    double mb = b < 0 ? -b : b;
    if (mb > mag) mag = mb;
    return diff <= abs_tol + rel_tol * mag;
}

// max_i |v_i|. Throws InvalidInput on an empty vector or non-finite entries.
double sup_norm(std::span<const double> v);

// sum_i w_i (weights are non-negative, so this is the l1 norm).
double l1_norm(const WeightVector& w);

// U = sum_i w_i * sat_i. Linear and monotone in every coordinate.
double utility(const WeightVector& w, const ExperientialState& x);

// Hoelder-style bound on the utility gap between two states:
//   |U(x) - U(xhat)| <= ||w||_1 * max_i |x_i - xhat_i|.
// Requires matching dimensions and timestamps.
UtilityGapBound utility_gap_bound(const WeightVector& w, const ExperientialState& x,
                                  const ExperientialState& xhat,
                                  double tol_abs = kTolAbs);

// Appends new need dimensions (weight, initial satisfaction). Existing
// components are untouched, so the utility of the old components is
// unchanged. sat_max bounds the new satisfaction values.
std::pair<ExperientialState, WeightVector>
extend_dimensions(const ExperientialState& x, const WeightVector& w,
                  const std::vector<std::pair<double, double>>& new_needs,
                  double sat_max = 1.0);

// Inverse of extend_dimensions: drops the last `count` dimensions.
std::pair<ExperientialState, WeightVector>
truncate_dimensions(const ExperientialState& x, const WeightVector& w,
                    std::size_t count);

} // namespace alignlab
