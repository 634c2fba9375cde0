#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "posteval/types.hpp"

namespace posteval {

/// Negative log predictive density at z. Returns +inf where the density is 0.
/// Throws for Point and SampleEnsemble, which have no tractable density.
double nll_score(const PredictiveDistribution& dist, double z);

/// The ceil((1 - alpha)(n + 1))-th smallest score, or +inf when that rank
/// exceeds n (the prediction set is then the whole domain).
double conformal_threshold(std::span<const double> scores, double alpha);

/// Threshold computation over an already ascending-sorted score list.
double conformal_threshold_sorted(std::span<const double> sorted_scores, double alpha);

struct ConformalCalibrator {
    std::vector<double> alphas;
    std::vector<double> thresholds;
    std::int64_t n_cal = 0;

    ConformalCalibrator(std::span<const double> cal_scores, std::span<const double> alphas);

    double threshold_at(double alpha) const;
};

/// Fraction of eval scores <= the conformal threshold at each alpha.
CoverageCurve coverage_curve(std::span<const double> cal_scores, std::span<const double> eval_scores,
                             std::span<const double> alphas);

struct Deviance {
    double value = 0.0;
    double alpha_lo = 0.0;
    double alpha_hi = 0.0;
};

/// Trapezoid integral of |empirical - (1 - alpha)| over [alphas.front(), alphas.back()].
/// No extrapolation outside the grid.
Deviance calibration_deviance(const CoverageCurve& curve);

/// The alpha grid lo, lo+step, ..., hi (inclusive up to rounding).
std::vector<double> alpha_grid(double lo, double hi, double step);

struct PredictionSet {
    double size = 0.0;
    std::int64_t n_components = 0;
};

/// Lebesgue size of {z : nll_score(dist, z) <= threshold} evaluated on a
/// uniform grid of `grid_points` nodes over [lo, hi]. Each in-set node
/// contributes one grid spacing; maximal runs of in-set nodes are components,
/// so gaps narrower than the grid spacing are invisible.
PredictionSet prediction_set_size(const PredictiveDistribution& dist, double threshold, double lo, double hi,
                                  std::int64_t grid_points);

/// Scores a distribution on the same uniform grid prediction_set_size uses.
std::vector<double> nll_on_grid(const PredictiveDistribution& dist, double lo, double hi, std::int64_t grid_points);

/// Set size and component count from precomputed grid scores.
PredictionSet prediction_set_from_scores(std::span<const double> grid_scores, double threshold, double spacing);

struct CoverageBin {
    double x_lo = 0.0;
    double x_hi = 0.0;
    std::int64_t count = 0;
    std::optional<double> coverage;  // absent for empty bins
    std::optional<double> binom_se;
};

/// Coverage at a fixed threshold in bins of the observation x. Bins follow
/// the histogram convention (half-open, last closed); events outside the
/// edges are ignored.
std::vector<CoverageBin> conditional_coverage(std::span<const EventRecord> events,
                                              std::span<const double> eval_scores, double threshold,
                                              std::span<const double> x_edges);

}  // namespace posteval
