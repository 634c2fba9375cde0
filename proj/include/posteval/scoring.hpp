#pragma once

#include <cstdint>
#include <span>

#include "posteval/types.hpp"

namespace posteval {

/// Empirical CRPS of a sorted ensemble against truth z:
///   (1/N) sum_k |s_k - z|  -  (1/(2N^2)) sum_k sum_j |s_k - s_j|
/// The double sum is taken over the sorted order as sum_k (2k - 1 - N) s_(k),
/// so the whole evaluation is linear after the sort done at construction.
double crps_empirical(const SampleEnsemble& ensemble, double z);

/// CRPS of a point forecast, i.e. the absolute error.
double crps_point(double prediction, double z);

/// Dispatches to crps_point / crps_empirical. Parametric and gridded
/// families must be sampled by the caller first.
double crps(const PredictiveDistribution& dist, double z);

/// Mean per-event CRPS. `dists[i]` must belong to `events[i]`; the reduction
/// runs in the given order.
double mean_crps(std::span<const EventRecord> events, std::span<const PredictiveDistribution> dists);

double rmse(std::span<const EventRecord> events, std::span<const double> predictions);
double mae(std::span<const EventRecord> events, std::span<const double> predictions);

/// Bins are [e_b, e_{b+1}) except the last, which is closed on the right.
Histogram build_histogram(std::span<const double> values, std::span<const double> edges);

/// `bins` uniform bins over [lo, hi].
std::vector<double> uniform_edges(double lo, double hi, std::size_t bins);

struct Chi2Result {
    double chi2 = 0.0;
    std::int64_t ndf = 0;
    std::int64_t bins_used = 0;
    std::int64_t pred_underflow = 0;
    std::int64_t pred_overflow = 0;
};

/// Pearson chi2 of `pred` against `truth`, over bins where the truth count is
/// nonzero. Not symmetric in its arguments.
Chi2Result spectrum_chi2(const Histogram& pred, const Histogram& truth);

/// Wasserstein-1 distance between the unit-normalized binned distributions.
double emd_1d(const Histogram& pred, const Histogram& truth);

}  // namespace posteval
