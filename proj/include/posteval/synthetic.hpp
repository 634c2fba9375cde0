#pragma once

// Synthetic inverse problem x = z^2 + eps, z ~ U(-a, a), eps ~ N(0, sigma_eps^2).
// The posterior p(z | x) is bimodal for x well above zero and is tabulated
// exactly on a grid, which gives the reference predictors below their
// analytic form.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "posteval/types.hpp"

namespace posteval {

struct SyntheticConfig {
    double a = 5.0;
    double sigma_eps = 0.5;
    std::int64_t grid_points = 2001;  // odd, so z = 0 is a node
    std::uint64_t seed = 0;

    void validate() const;
};

std::vector<EventRecord> generate_events(const SyntheticConfig& config, std::int64_t n);

PosteriorGrid analytic_posterior(const SyntheticConfig& config, double x);

/// Inverse-CDF draws from a tabulated posterior.
std::vector<double> posterior_sample(const PosteriorGrid& grid, std::int64_t n, std::uint64_t seed);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

Moments posterior_moments(const PosteriorGrid& grid);

enum class PredictorKind { ConditionalMean, MomentGaussian, TwoModeMixture, ExactPosterior };

/// Parses the CLI method names: point-mean, gaussian, mixture2, exact.
PredictorKind parse_predictor_kind(const std::string& name);
std::string predictor_name(PredictorKind kind);

/// Analytic optimum of each model family under its training objective:
///   ConditionalMean  the posterior mean (MSE optimum)
///   MomentGaussian   Gaussian matching posterior mean and variance (Gaussian NLL optimum)
///   TwoModeMixture   one Gaussian per half-line z < 0, z >= 0, weighted by its mass
///   ExactPosterior   the tabulated posterior itself
class ReferencePredictor {
public:
    ReferencePredictor(PredictorKind kind, SyntheticConfig config);

    PredictorKind kind() const noexcept { return kind_; }
    const SyntheticConfig& config() const noexcept { return config_; }

    PredictiveDistribution predict(double x) const;

private:
    PredictorKind kind_;
    SyntheticConfig config_;
};

VarianceDecomposition variance_decomposition(const SyntheticConfig& config, std::span<const EventRecord> events);

enum class Observable { Square };

struct JensenGap {
    double of_mean = 0.0;  // O(E[z|x])
    double mean_of = 0.0;  // E[O(z)|x]
    double gap = 0.0;
};

JensenGap jensen_gap(const SyntheticConfig& config, double x, Observable observable = Observable::Square);

}  // namespace posteval
