#include "posteval/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace posteval {

namespace {

void require_aligned(std::span<const EventRecord> events, std::size_t n) {
    if (events.size() != n)
        throw Error("length mismatch: " + std::to_string(events.size()) + " events vs " + std::to_string(n) +
                    " predictions");
    if (events.empty()) throw Error("no events");
}

void require_same_edges(const Histogram& a, const Histogram& b) {
    if (a.edges != b.edges) throw Error("histogram edges differ");
}

}  // namespace

double crps_empirical(const SampleEnsemble& ensemble, double z) {
    if (!std::isfinite(z)) throw Error("non-finite truth value");
    const auto s = ensemble.sorted();
    const auto n = static_cast<double>(s.size());
    double abs_err = 0.0;
    double spread = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        abs_err += std::abs(s[k] - z);
        spread += (2.0 * static_cast<double>(k + 1) - 1.0 - n) * s[k];
    }
    // sum_k sum_j |s_k - s_j| = 2 * spread
    const double value = abs_err / n - spread / (n * n);
    return std::max(value, 0.0);
}

double crps_point(double prediction, double z) {
    if (!std::isfinite(prediction) || !std::isfinite(z)) throw Error("non-finite input to crps_point");
    return std::abs(prediction - z);
}

double crps(const PredictiveDistribution& dist, double z) {
    if (const auto* p = std::get_if<Point>(&dist)) return crps_point(p->value, z);
    if (const auto* e = std::get_if<SampleEnsemble>(&dist)) return crps_empirical(*e, z);
    throw Error("CRPS of a " + family_name(dist) + " prediction requires sampling it to an ensemble first");
}

double mean_crps(std::span<const EventRecord> events, std::span<const PredictiveDistribution> dists) {
    require_aligned(events, dists.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) sum += crps(dists[i], events[i].z_true);
    return sum / static_cast<double>(events.size());
}

double rmse(std::span<const EventRecord> events, std::span<const double> predictions) {
    require_aligned(events, predictions.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const double d = predictions[i] - events[i].z_true;
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(events.size()));
}

double mae(std::span<const EventRecord> events, std::span<const double> predictions) {
    require_aligned(events, predictions.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) sum += std::abs(predictions[i] - events[i].z_true);
    return sum / static_cast<double>(events.size());
}

Histogram build_histogram(std::span<const double> values, std::span<const double> edges) {
    Histogram h;
    h.edges.assign(edges.begin(), edges.end());
    if (h.edges.size() < 2) throw Error("histogram needs at least one bin");
    h.counts.assign(h.edges.size() - 1, 0);
    h.validate();
    for (double v : values) {
        if (v < h.edges.front()) {
            ++h.underflow;
        } else if (v > h.edges.back()) {
            ++h.overflow;
        } else {
            auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
            auto bin = static_cast<std::size_t>(it - h.edges.begin()) - 1;
            ++h.counts[std::min(bin, h.counts.size() - 1)];
        }
    }
    return h;
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
    if (bins < 1 || !(lo < hi)) throw Error("uniform edges need bins >= 1 and lo < hi");
    std::vector<double> edges(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b)
        edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
    edges.back() = hi;
    return edges;
}

Chi2Result spectrum_chi2(const Histogram& pred, const Histogram& truth) {
    pred.validate();
    truth.validate();
    require_same_edges(pred, truth);
    Chi2Result r;
    for (std::size_t b = 0; b < truth.bins(); ++b) {
        if (truth.counts[b] == 0) continue;
        const double d = static_cast<double>(pred.counts[b] - truth.counts[b]);
        r.chi2 += d * d / static_cast<double>(truth.counts[b]);
        ++r.bins_used;
    }
    if (r.bins_used < 2) throw Error("spectrum chi2 needs at least 2 nonzero truth bins");
    r.ndf = r.bins_used - 1;
    r.pred_underflow = pred.underflow;
    r.pred_overflow = pred.overflow;
    return r;
}

double emd_1d(const Histogram& pred, const Histogram& truth) {
    pred.validate();
    truth.validate();
    require_same_edges(pred, truth);
    const double np = static_cast<double>(pred.in_range());
    const double nt = static_cast<double>(truth.in_range());
    if (np <= 0.0 || nt <= 0.0) throw Error("EMD needs histograms with nonzero in-range total");
    double cdf_p = 0.0;
    double cdf_t = 0.0;
    double dist = 0.0;
    for (std::size_t b = 0; b + 1 < pred.bins(); ++b) {
        cdf_p += static_cast<double>(pred.counts[b]) / np;
        cdf_t += static_cast<double>(truth.counts[b]) / nt;
        // mass crossing the boundary between bin b and b+1 travels one center-to-center step
        const double step = 0.5 * (pred.edges[b + 2] - pred.edges[b]);
        dist += std::abs(cdf_p - cdf_t) * step;
    }
    return dist;
}

}  // namespace posteval
