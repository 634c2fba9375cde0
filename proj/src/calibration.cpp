#include "posteval/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace posteval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double gaussian_nll(double mu, double sigma, double z) {
    const double u = (z - mu) / sigma;
    return kHalfLog2Pi + std::log(sigma) + 0.5 * u * u;
}

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1), got " + std::to_string(alpha));
}

}  // namespace

double nll_score(const PredictiveDistribution& dist, double z) {
    if (!std::isfinite(z)) throw Error("non-finite truth value");
    if (const auto* g = std::get_if<Gaussian>(&dist)) return gaussian_nll(g->mu, g->sigma, z);
    if (const auto* m = std::get_if<Mixture>(&dist)) {
        // log-sum-exp over components with nonzero weight
        double best = -kInf;
        std::vector<double> terms(m->weights.size(), -kInf);
        for (std::size_t k = 0; k < terms.size(); ++k) {
            if (m->weights[k] <= 0.0) continue;
            terms[k] = std::log(m->weights[k]) - gaussian_nll(m->means[k], m->sigmas[k], z);
            best = std::max(best, terms[k]);
        }
        if (best == -kInf) return kInf;
        double acc = 0.0;
        for (double t : terms) acc += std::exp(t - best);
        return -(best + std::log(acc));
    }
    if (const auto* g = std::get_if<GriddedDensity>(&dist)) {
        const double p = g->at(z);
        return p > 0.0 ? -std::log(p) : kInf;
    }
    throw Error("no tractable density for a " + family_name(dist) + " prediction");
}

double conformal_threshold_sorted(std::span<const double> sorted, double alpha) {
    if (sorted.empty()) throw Error("conformal threshold needs at least one calibration score");
    require_alpha(alpha);
    const double n = static_cast<double>(sorted.size());
    // the tolerance absorbs representation error in (1 - alpha), e.g. 0.9 * 10
    const double rank = std::ceil((1.0 - alpha) * (n + 1.0) - 1e-9);
    if (rank > n) return kInf;
    return sorted[static_cast<std::size_t>(std::max(rank, 1.0)) - 1];
}

double conformal_threshold(std::span<const double> scores, double alpha) {
    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end());
    return conformal_threshold_sorted(sorted, alpha);
}

ConformalCalibrator::ConformalCalibrator(std::span<const double> cal_scores, std::span<const double> alpha_values)
    : alphas(alpha_values.begin(), alpha_values.end()), n_cal(static_cast<std::int64_t>(cal_scores.size())) {
    if (cal_scores.empty()) throw Error("calibrator needs at least one calibration score");
    std::vector<double> sorted(cal_scores.begin(), cal_scores.end());
    std::sort(sorted.begin(), sorted.end());
    thresholds.reserve(alphas.size());
    for (std::size_t m = 0; m < alphas.size(); ++m) {
        if (m > 0 && !(alphas[m] > alphas[m - 1])) throw Error("alphas must be strictly increasing");
        thresholds.push_back(conformal_threshold_sorted(sorted, alphas[m]));
        if (m > 0 && thresholds[m] > thresholds[m - 1]) throw Error("conformal thresholds not monotone");
    }
}

double ConformalCalibrator::threshold_at(double alpha) const {
    for (std::size_t m = 0; m < alphas.size(); ++m)
        if (std::abs(alphas[m] - alpha) < 1e-12) return thresholds[m];
    throw Error("alpha " + std::to_string(alpha) + " not on the calibrator grid");
}

CoverageCurve coverage_curve(std::span<const double> cal_scores, std::span<const double> eval_scores,
                             std::span<const double> alphas) {
    if (eval_scores.empty()) throw Error("coverage curve needs at least one evaluation score");
    if (alphas.empty()) throw Error("coverage curve needs at least one alpha");
    for (double a : alphas) require_alpha(a);
    const ConformalCalibrator cal(cal_scores, alphas);

    std::vector<double> sorted_eval(eval_scores.begin(), eval_scores.end());
    std::sort(sorted_eval.begin(), sorted_eval.end());
    const double n = static_cast<double>(sorted_eval.size());

    CoverageCurve curve;
    curve.alphas.assign(alphas.begin(), alphas.end());
    curve.empirical.reserve(alphas.size());
    for (double q : cal.thresholds) {
        const auto covered = std::upper_bound(sorted_eval.begin(), sorted_eval.end(), q) - sorted_eval.begin();
        curve.empirical.push_back(static_cast<double>(covered) / n);
    }
    curve.validate();
    return curve;
}

Deviance calibration_deviance(const CoverageCurve& curve) {
    curve.validate();
    if (curve.alphas.size() < 2) throw Error("calibration deviance needs at least 2 grid points");
    Deviance d;
    d.alpha_lo = curve.alphas.front();
    d.alpha_hi = curve.alphas.back();
    auto gap = [&](std::size_t m) { return std::abs(curve.empirical[m] - (1.0 - curve.alphas[m])); };
    for (std::size_t m = 0; m + 1 < curve.alphas.size(); ++m)
        d.value += 0.5 * (gap(m) + gap(m + 1)) * (curve.alphas[m + 1] - curve.alphas[m]);
    return d;
}

std::vector<double> alpha_grid(double lo, double hi, double step) {
    if (!(lo > 0.0 && hi < 1.0 && lo <= hi && step > 0.0)) throw Error("invalid alpha grid");
    std::vector<double> out;
    const auto count = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    out.reserve(static_cast<std::size_t>(count));
    // recompute from the index so values like 0.07 are not accumulated sums
    for (std::int64_t i = 0; i < count; ++i) out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
    return out;
}

std::vector<double> nll_on_grid(const PredictiveDistribution& dist, double lo, double hi, std::int64_t grid_points) {
    if (!has_density(dist)) throw Error("no tractable density for a " + family_name(dist) + " prediction");
    if (grid_points < 2) throw Error("prediction-set grid needs at least 2 points");
    if (!(lo < hi)) throw Error("prediction-set grid requires lo < hi");
    std::vector<double> scores(static_cast<std::size_t>(grid_points));
    const double last = static_cast<double>(grid_points - 1);
    for (std::int64_t i = 0; i < grid_points; ++i) {
        const double z = i + 1 == grid_points ? hi : lo + (hi - lo) * static_cast<double>(i) / last;
        scores[static_cast<std::size_t>(i)] = nll_score(dist, z);
    }
    return scores;
}

PredictionSet prediction_set_from_scores(std::span<const double> grid_scores, double threshold, double spacing) {
    PredictionSet set;
    std::int64_t inside = 0;
    bool prev = false;
    for (double s : grid_scores) {
        const bool in = s <= threshold;
        if (in) {
            ++inside;
            if (!prev) ++set.n_components;
        }
        prev = in;
    }
    set.size = static_cast<double>(inside) * spacing;
    return set;
}

PredictionSet prediction_set_size(const PredictiveDistribution& dist, double threshold, double lo, double hi,
                                  std::int64_t grid_points) {
    const auto scores = nll_on_grid(dist, lo, hi, grid_points);
    if (threshold == kInf) return {hi - lo, 1};
    return prediction_set_from_scores(scores, threshold, (hi - lo) / static_cast<double>(grid_points - 1));
}

std::vector<CoverageBin> conditional_coverage(std::span<const EventRecord> events,
                                              std::span<const double> eval_scores, double threshold,
                                              std::span<const double> x_edges) {
    if (events.size() != eval_scores.size()) throw Error("events and scores differ in length");
    if (x_edges.size() < 2) throw Error("conditional coverage needs at least one x bin");
    for (std::size_t k = 0; k + 1 < x_edges.size(); ++k)
        if (!(x_edges[k] < x_edges[k + 1])) throw Error("x edges must be strictly increasing");

    const std::size_t bins = x_edges.size() - 1;
    std::vector<std::int64_t> count(bins, 0), covered(bins, 0);
    for (std::size_t i = 0; i < events.size(); ++i) {
        const double x = events[i].x;
        if (x < x_edges.front() || x > x_edges.back()) continue;
        auto it = std::upper_bound(x_edges.begin(), x_edges.end(), x);
        const auto b = std::min(static_cast<std::size_t>(it - x_edges.begin()) - 1, bins - 1);
        ++count[b];
        if (eval_scores[i] <= threshold) ++covered[b];
    }

    std::vector<CoverageBin> out(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].x_lo = x_edges[b];
        out[b].x_hi = x_edges[b + 1];
        out[b].count = count[b];
        if (count[b] == 0) continue;
        const double n = static_cast<double>(count[b]);
        const double c = static_cast<double>(covered[b]) / n;
        out[b].coverage = c;
        out[b].binom_se = std::sqrt(c * (1.0 - c) / n);
    }
    return out;
}

}  // namespace posteval
