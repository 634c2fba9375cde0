#include "posteval/sampling.hpp"

#include <algorithm>

namespace posteval {

std::vector<double> cumulative_trapezoid(std::span<const double> density, double spacing) {
    std::vector<double> cdf(density.size(), 0.0);
    for (std::size_t i = 1; i < density.size(); ++i) cdf[i] = cdf[i - 1] + 0.5 * (density[i - 1] + density[i]) * spacing;
    const double total = cdf.back();
    if (!(total > 0.0)) throw Error("density has zero mass");
    for (double& c : cdf) c /= total;
    cdf.back() = 1.0;
    return cdf;
}

InverseCdfSampler::InverseCdfSampler(double lo, double spacing, std::vector<double> cdf)
    : lo_(lo), spacing_(spacing), cdf_(std::move(cdf)) {
    if (cdf_.size() < 2) throw Error("inverse-CDF sampler needs at least 2 nodes");
}

InverseCdfSampler InverseCdfSampler::from_density(double lo, double spacing, std::span<const double> density) {
    return InverseCdfSampler(lo, spacing, cumulative_trapezoid(density, spacing));
}

double InverseCdfSampler::quantile(double u) const noexcept {
    // first node with cdf > u; flat stretches of zero mass are skipped
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return lo_ + spacing_ * static_cast<double>(cdf_.size() - 1);
    const auto hi = static_cast<std::size_t>(it - cdf_.begin());
    if (hi == 0) return lo_;
    const std::size_t lo = hi - 1;
    const double frac = (u - cdf_[lo]) / (cdf_[hi] - cdf_[lo]);
    return lo_ + spacing_ * (static_cast<double>(lo) + frac);
}

std::vector<double> draw_samples(const PredictiveDistribution& dist, std::size_t n, RandomStream& rng) {
    std::vector<double> out(n);
    if (const auto* p = std::get_if<Point>(&dist)) {
        std::fill(out.begin(), out.end(), p->value);
    } else if (const auto* g = std::get_if<Gaussian>(&dist)) {
        for (auto& v : out) v = g->mu + g->sigma * rng.normal();
    } else if (const auto* m = std::get_if<Mixture>(&dist)) {
        for (auto& v : out) {
            const double u = rng.uniform();
            std::size_t k = 0;
            double acc = m->weights[0];
            while (u >= acc && k + 1 < m->weights.size()) acc += m->weights[++k];
            v = m->means[k] + m->sigmas[k] * rng.normal();
        }
    } else if (const auto* e = std::get_if<SampleEnsemble>(&dist)) {
        const auto s = e->sorted();
        for (auto& v : out) {
            auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(s.size()));
            v = s[std::min(idx, s.size() - 1)];
        }
    } else {
        const auto& d = std::get<GriddedDensity>(dist);
        const auto sampler = InverseCdfSampler::from_density(d.lo, d.spacing(), d.density);
        for (auto& v : out) v = sampler.draw(rng);
    }
    return out;
}

double distribution_mean(const PredictiveDistribution& dist) {
    if (const auto* p = std::get_if<Point>(&dist)) return p->value;
    if (const auto* g = std::get_if<Gaussian>(&dist)) return g->mu;
    if (const auto* m = std::get_if<Mixture>(&dist)) {
        double mean = 0.0;
        for (std::size_t k = 0; k < m->weights.size(); ++k) mean += m->weights[k] * m->means[k];
        return mean;
    }
    if (const auto* e = std::get_if<SampleEnsemble>(&dist)) return e->mean();
    const auto& d = std::get<GriddedDensity>(dist);
    std::vector<double> zp(d.density.size());
    for (std::size_t i = 0; i < zp.size(); ++i) zp[i] = d.node(i) * d.density[i];
    return trapezoid(zp, d.spacing()) / trapezoid(d.density, d.spacing());
}

}  // namespace posteval
