#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace posteval {

/// Raised for every contract violation: bad inputs, broken invariants,
/// malformed files. The message is meant for end users.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kMixtureWeightTolerance = 1e-12;
inline constexpr double kDensityNormTolerance = 1e-9;

/// One (observation, latent truth) pair.
struct EventRecord {
    std::int64_t event_id = 0;
    double x = 0.0;
    double z_true = 0.0;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

void validate_events(std::span<const EventRecord> events);

// ---------------------------------------------------------------------------
// Predictive families. Each is constructed through a factory that enforces
// its invariants, so an instance that exists is valid.
// ---------------------------------------------------------------------------

struct Point {
    double value = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct Gaussian {
    double mu = 0.0;
    double sigma = 1.0;
    friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

struct Mixture {
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> sigmas;
    friend bool operator==(const Mixture&, const Mixture&) = default;
};

class SampleEnsemble {
public:
    /// Sorts a copy of `samples`. Throws on empty or non-finite input.
    explicit SampleEnsemble(std::vector<double> samples);

    std::span<const double> sorted() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double mean() const noexcept;

    friend bool operator==(const SampleEnsemble&, const SampleEnsemble&) = default;

private:
    std::vector<double> samples_;
};

/// Density tabulated on a uniform grid of density.size() nodes spanning [lo, hi].
struct GriddedDensity {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> density;

    double spacing() const noexcept {
        return (hi - lo) / static_cast<double>(density.size() - 1);
    }
    double node(std::size_t i) const noexcept {
        return i + 1 == density.size() ? hi : lo + static_cast<double>(i) * spacing();
    }
    /// Linear interpolation; zero outside [lo, hi].
    double at(double z) const noexcept;

    friend bool operator==(const GriddedDensity&, const GriddedDensity&) = default;
};

using PredictiveDistribution = std::variant<Point, Gaussian, Mixture, SampleEnsemble, GriddedDensity>;

PredictiveDistribution make_point(double value);
PredictiveDistribution make_gaussian(double mu, double sigma);
PredictiveDistribution make_mixture(std::vector<double> weights, std::vector<double> means,
                                    std::vector<double> sigmas);
PredictiveDistribution make_sample_ensemble(std::vector<double> samples);
PredictiveDistribution make_gridded_density(double lo, double hi, std::vector<double> density);

/// Short lowercase family tag, also used as the JSONL "type" field.
std::string family_name(const PredictiveDistribution& dist);

/// True for the families with an evaluable density (Gaussian, Mixture, grid).
bool has_density(const PredictiveDistribution& dist) noexcept;

/// Trapezoid rule over a uniform grid.
double trapezoid(std::span<const double> values, double spacing) noexcept;

// ---------------------------------------------------------------------------

struct Histogram {
    std::vector<double> edges;
    std::vector<std::int64_t> counts;
    std::int64_t underflow = 0;
    std::int64_t overflow = 0;

    std::size_t bins() const noexcept { return counts.size(); }
    std::int64_t in_range() const noexcept;
    std::int64_t total() const noexcept { return in_range() + underflow + overflow; }

    /// Checks edge monotonicity and the counts/edges length relation.
    void validate() const;

    friend bool operator==(const Histogram&, const Histogram&) = default;
};

/// Normalized posterior tabulated on a uniform grid.
struct PosteriorGrid {
    std::vector<double> grid;
    std::vector<double> log_unnorm;
    std::vector<double> density;
    std::vector<double> cdf;

    double spacing() const noexcept { return grid[1] - grid[0]; }
    GriddedDensity as_gridded_density() const;
};

struct CoverageCurve {
    /// Miscoverage levels; the nominal coverage at alphas[m] is 1 - alphas[m].
    std::vector<double> alphas;
    std::vector<double> empirical;

    void validate() const;
};

struct VarianceDecomposition {
    double var_total = 0.0;
    double var_of_means = 0.0;
    double mean_of_vars = 0.0;
};

}  // namespace posteval
