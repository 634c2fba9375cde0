#pragma once

#include <span>
#include <vector>

#include "posteval/random.hpp"
#include "posteval/types.hpp"

namespace posteval {

/// Inverse-CDF sampler over a uniform grid. The CDF is the cumulative
/// trapezoid of the density, rescaled to end at exactly 1; a uniform level is
/// mapped back by linear interpolation between the bracketing nodes.
class InverseCdfSampler {
public:
    InverseCdfSampler(double lo, double spacing, std::vector<double> cdf);

    static InverseCdfSampler from_density(double lo, double spacing, std::span<const double> density);

    double quantile(double u) const noexcept;
    double draw(RandomStream& rng) const noexcept { return quantile(rng.uniform()); }
    std::span<const double> cdf() const noexcept { return cdf_; }

private:
    double lo_;
    double spacing_;
    std::vector<double> cdf_;
};

/// Cumulative trapezoid normalized to [0, 1].
std::vector<double> cumulative_trapezoid(std::span<const double> density, double spacing);

/// Draws n values from any predictive family. A Point repeats its value; a
/// SampleEnsemble is resampled uniformly with replacement.
std::vector<double> draw_samples(const PredictiveDistribution& dist, std::size_t n, RandomStream& rng);

/// Analytic mean, where one exists; the ensemble mean for SampleEnsemble.
double distribution_mean(const PredictiveDistribution& dist);

}  // namespace posteval
