#include "posteval/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "posteval/random.hpp"
#include "posteval/sampling.hpp"

namespace posteval {

void SyntheticConfig::validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw Error("a must be positive");
    if (!(sigma_eps > 0.0) || !std::isfinite(sigma_eps)) throw Error("sigma_eps must be positive");
    if (grid_points < 101) throw Error("grid_points must be at least 101");
    if (grid_points % 2 == 0) throw Error("grid_points must be odd");
}

std::vector<EventRecord> generate_events(const SyntheticConfig& config, std::int64_t n) {
    config.validate();
    if (n < 1) throw Error("n must be at least 1");
    std::vector<EventRecord> events(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        RandomStream rng(config.seed, stream_id(StreamTag::Generate, static_cast<std::uint64_t>(i)));
        const double z = config.a * (2.0 * rng.uniform() - 1.0);
        const double x = z * z + config.sigma_eps * rng.normal();
        events[static_cast<std::size_t>(i)] = {i, x, z};
    }
    return events;
}

PosteriorGrid analytic_posterior(const SyntheticConfig& config, double x) {
    config.validate();
    if (!std::isfinite(x)) throw Error("non-finite observation");
    const auto g = static_cast<std::size_t>(config.grid_points);
    const auto half = static_cast<std::int64_t>(g - 1) / 2;
    PosteriorGrid post;
    post.grid.resize(g);
    post.log_unnorm.resize(g);
    post.density.resize(g);

    const double two_var = 2.0 * config.sigma_eps * config.sigma_eps;
    for (std::size_t i = 0; i < g; ++i) {
        // integer-symmetric node placement keeps grid[i] == -grid[g-1-i] exactly
        post.grid[i] = config.a * static_cast<double>(static_cast<std::int64_t>(i) - half) / static_cast<double>(half);
        const double r = x - post.grid[i] * post.grid[i];
        post.log_unnorm[i] = -r * r / two_var;
    }
    const double peak = *std::max_element(post.log_unnorm.begin(), post.log_unnorm.end());
    for (std::size_t i = 0; i < g; ++i) post.density[i] = std::exp(post.log_unnorm[i] - peak);
    const double h = post.spacing();
    const double norm = trapezoid(post.density, h);
    for (double& d : post.density) d /= norm;
    post.cdf = cumulative_trapezoid(post.density, h);
    return post;
}

std::vector<double> posterior_sample(const PosteriorGrid& grid, std::int64_t n, std::uint64_t seed) {
    if (n < 1) throw Error("n must be at least 1");
    const InverseCdfSampler sampler(grid.grid.front(), grid.spacing(), grid.cdf);
    RandomStream rng(seed, stream_id(StreamTag::User, 0));
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out) v = sampler.draw(rng);
    return out;
}

namespace {

struct HalfMoments {
    double mass = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

// Trapezoid moments over nodes [first, last] inclusive.
HalfMoments moments_over(const PosteriorGrid& p, std::size_t first, std::size_t last) {
    const double h = p.spacing();
    auto integrate = [&](auto&& f) {
        double s = 0.5 * (f(first) + f(last));
        for (std::size_t i = first + 1; i < last; ++i) s += f(i);
        return s * h;
    };
    HalfMoments m;
    m.mass = integrate([&](std::size_t i) { return p.density[i]; });
    m.mean = integrate([&](std::size_t i) { return p.grid[i] * p.density[i]; }) / m.mass;
    m.variance = integrate([&](std::size_t i) {
                     const double d = p.grid[i] - m.mean;
                     return d * d * p.density[i];
                 }) /
                 m.mass;
    return m;
}

}  // namespace

Moments posterior_moments(const PosteriorGrid& grid) {
    const auto m = moments_over(grid, 0, grid.grid.size() - 1);
    return {m.mean, m.variance};
}

PredictorKind parse_predictor_kind(const std::string& name) {
    if (name == "point-mean") return PredictorKind::ConditionalMean;
    if (name == "gaussian") return PredictorKind::MomentGaussian;
    if (name == "mixture2") return PredictorKind::TwoModeMixture;
    if (name == "exact") return PredictorKind::ExactPosterior;
    throw Error("unknown method '" + name + "' (expected point-mean, gaussian, mixture2 or exact)");
}

std::string predictor_name(PredictorKind kind) {
    switch (kind) {
        case PredictorKind::ConditionalMean: return "point-mean";
        case PredictorKind::MomentGaussian: return "gaussian";
        case PredictorKind::TwoModeMixture: return "mixture2";
        case PredictorKind::ExactPosterior: return "exact";
    }
    return "unknown";
}

ReferencePredictor::ReferencePredictor(PredictorKind kind, SyntheticConfig config)
    : kind_(kind), config_(config) {
    config_.validate();
}

PredictiveDistribution ReferencePredictor::predict(double x) const {
    const auto post = analytic_posterior(config_, x);
    switch (kind_) {
        case PredictorKind::ConditionalMean:
            return make_point(posterior_moments(post).mean);
        case PredictorKind::MomentGaussian: {
            const auto m = posterior_moments(post);
            return make_gaussian(m.mean, std::sqrt(m.variance));
        }
        case PredictorKind::TwoModeMixture: {
            const std::size_t centre = post.grid.size() / 2;
            const auto left = moments_over(post, 0, centre);
            const auto right = moments_over(post, centre, post.grid.size() - 1);
            const double total = left.mass + right.mass;
            const double w_left = left.mass / total;
            return make_mixture({w_left, 1.0 - w_left}, {left.mean, right.mean},
                                {std::sqrt(left.variance), std::sqrt(right.variance)});
        }
        case PredictorKind::ExactPosterior: {
            auto g = post.as_gridded_density();
            return make_gridded_density(g.lo, g.hi, std::move(g.density));
        }
    }
    throw Error("unhandled predictor kind");
}

VarianceDecomposition variance_decomposition(const SyntheticConfig& config, std::span<const EventRecord> events) {
    if (events.size() < 2) throw Error("variance decomposition needs at least 2 events");
    const double n = static_cast<double>(events.size());
    std::vector<double> means(events.size());
    double sum_var = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto m = posterior_moments(analytic_posterior(config, events[i].x));
        means[i] = m.mean;
        sum_var += m.variance;
    }
    auto sample_variance = [n](auto begin, auto end, auto value) {
        double mean = 0.0;
        for (auto it = begin; it != end; ++it) mean += value(*it);
        mean /= n;
        double ss = 0.0;
        for (auto it = begin; it != end; ++it) ss += (value(*it) - mean) * (value(*it) - mean);
        return ss / (n - 1.0);
    };
    VarianceDecomposition d;
    d.var_total = sample_variance(events.begin(), events.end(), [](const EventRecord& e) { return e.z_true; });
    d.var_of_means = sample_variance(means.begin(), means.end(), [](double m) { return m; });
    d.mean_of_vars = sum_var / n;
    return d;
}

JensenGap jensen_gap(const SyntheticConfig& config, double x, Observable observable) {
    if (observable != Observable::Square) throw Error("unsupported observable");
    const auto post = analytic_posterior(config, x);
    std::vector<double> z2p(post.grid.size()), zp(post.grid.size());
    for (std::size_t i = 0; i < post.grid.size(); ++i) {
        zp[i] = post.grid[i] * post.density[i];
        z2p[i] = post.grid[i] * zp[i];
    }
    const double mean = trapezoid(zp, post.spacing());
    JensenGap j;
    j.of_mean = mean * mean;
    j.mean_of = trapezoid(z2p, post.spacing());
    j.gap = j.mean_of - j.of_mean;
    return j;
}

}  // namespace posteval
