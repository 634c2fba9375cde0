#include "posteval/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace posteval {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw Error(std::string("non-finite ") + what);
}

}  // namespace

void validate_events(std::span<const EventRecord> events) {
    std::unordered_set<std::int64_t> seen;
    seen.reserve(events.size());
    for (const auto& e : events) {
        if (!std::isfinite(e.x) || !std::isfinite(e.z_true))
            throw Error("event " + std::to_string(e.event_id) + ": non-finite x or z_true");
        if (!seen.insert(e.event_id).second)
            throw Error("duplicate event_id " + std::to_string(e.event_id));
    }
}

SampleEnsemble::SampleEnsemble(std::vector<double> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw Error("empty ensemble");
    for (double s : samples_)
        if (!std::isfinite(s)) throw Error("non-finite sample");
    std::sort(samples_.begin(), samples_.end());
}

double SampleEnsemble::mean() const noexcept {
    return std::accumulate(samples_.begin(), samples_.end(), 0.0) / static_cast<double>(samples_.size());
}

double GriddedDensity::at(double z) const noexcept {
    if (!(z >= lo && z <= hi)) return 0.0;
    const auto last = density.size() - 1;
    const double t = (z - lo) / (hi - lo) * static_cast<double>(last);
    const double nearest = std::round(t);
    if (std::abs(t - nearest) <= 1e-9) return density[std::min(static_cast<std::size_t>(nearest), last)];
    const auto i = std::min(static_cast<std::size_t>(t), last - 1);
    const double frac = t - static_cast<double>(i);
    return density[i] + frac * (density[i + 1] - density[i]);
}

double trapezoid(std::span<const double> values, double spacing) noexcept {
    if (values.size() < 2) return 0.0;
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
    return sum * spacing;
}

PredictiveDistribution make_point(double value) {
    require_finite(value, "point value");
    return Point{value};
}

PredictiveDistribution make_gaussian(double mu, double sigma) {
    require_finite(mu, "mu");
    require_finite(sigma, "sigma");
    if (!(sigma > 0.0)) throw Error("sigma must be positive");
    return Gaussian{mu, sigma};
}

PredictiveDistribution make_mixture(std::vector<double> weights, std::vector<double> means,
                                    std::vector<double> sigmas) {
    if (weights.empty()) throw Error("mixture needs at least one component");
    if (weights.size() != means.size() || weights.size() != sigmas.size())
        throw Error("mixture arrays must have equal length");
    double total = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        require_finite(weights[k], "mixture weight");
        require_finite(means[k], "mixture mean");
        require_finite(sigmas[k], "mixture sigma");
        if (weights[k] < 0.0) throw Error("mixture weights must be nonnegative");
        if (!(sigmas[k] > 0.0)) throw Error("sigma must be positive");
        total += weights[k];
    }
    if (std::abs(total - 1.0) > kMixtureWeightTolerance) throw Error("mixture weights must sum to 1");
    return Mixture{std::move(weights), std::move(means), std::move(sigmas)};
}

PredictiveDistribution make_sample_ensemble(std::vector<double> samples) {
    return SampleEnsemble(std::move(samples));
}

PredictiveDistribution make_gridded_density(double lo, double hi, std::vector<double> density) {
    require_finite(lo, "grid lo");
    require_finite(hi, "grid hi");
    if (!(lo < hi)) throw Error("grid requires lo < hi");
    if (density.size() < 2) throw Error("grid density needs at least 2 nodes");
    for (double d : density) {
        require_finite(d, "grid density");
        if (d < 0.0) throw Error("grid density must be nonnegative");
    }
    const double spacing = (hi - lo) / static_cast<double>(density.size() - 1);
    if (std::abs(trapezoid(density, spacing) - 1.0) > kDensityNormTolerance)
        throw Error("grid density must integrate to 1");
    return GriddedDensity{lo, hi, std::move(density)};
}

std::string family_name(const PredictiveDistribution& dist) {
    static constexpr const char* names[] = {"point", "gaussian", "mixture", "samples", "grid"};
    return names[dist.index()];
}

bool has_density(const PredictiveDistribution& dist) noexcept {
    return std::holds_alternative<Gaussian>(dist) || std::holds_alternative<Mixture>(dist) ||
           std::holds_alternative<GriddedDensity>(dist);
}

std::int64_t Histogram::in_range() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

void Histogram::validate() const {
    if (edges.size() < 2) throw Error("histogram needs at least one bin");
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        if (!(edges[i] < edges[i + 1])) throw Error("histogram edges must be strictly increasing");
    if (counts.size() + 1 != edges.size()) throw Error("histogram counts length must be edges length - 1");
    for (auto c : counts)
        if (c < 0) throw Error("histogram counts must be nonnegative");
    if (underflow < 0 || overflow < 0) throw Error("histogram counts must be nonnegative");
}

GriddedDensity PosteriorGrid::as_gridded_density() const {
    return GriddedDensity{grid.front(), grid.back(), density};
}

void CoverageCurve::validate() const {
    if (alphas.size() != empirical.size()) throw Error("coverage curve arrays differ in length");
    for (std::size_t m = 0; m < alphas.size(); ++m) {
        if (!(alphas[m] > 0.0 && alphas[m] < 1.0)) throw Error("alpha must lie in (0, 1)");
        if (m > 0 && !(alphas[m] > alphas[m - 1])) throw Error("alphas must be strictly increasing");
        if (!(empirical[m] >= 0.0 && empirical[m] <= 1.0)) throw Error("empirical coverage must lie in [0, 1]");
    }
}

}  // namespace posteval
