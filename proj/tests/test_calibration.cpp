#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "posteval/calibration.hpp"
#include "posteval/random.hpp"
#include "posteval/sampling.hpp"

namespace posteval {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(NllScore, GaussianAtMean) {
    EXPECT_NEAR(nll_score(make_gaussian(0.0, 1.0), 0.0), 0.9189385332046727, 1e-12);
}

TEST(NllScore, SymmetricMixtureAtZero) {
    // both components contribute phi(1), so the score is -log phi(1)
    const double expected = -std::log(oracle::std_normal_pdf(1.0));
    EXPECT_NEAR(expected, 1.4189385332046727, 1e-12);
    EXPECT_NEAR(nll_score(make_mixture({0.5, 0.5}, {-1.0, 1.0}, {1.0, 1.0}), 0.0), expected, 1e-12);
}

TEST(NllScore, UnsupportedFamilies) {
    try {
        nll_score(make_point(0.0), 0.0);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("no tractable density"), std::string::npos);
    }
    EXPECT_THROW(nll_score(make_sample_ensemble({1.0, 2.0}), 0.0), Error);
}

TEST(NllScore, OneComponentMixtureEqualsGaussian) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0), s(0.1, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double mu = u(rng), sigma = s(rng), z = u(rng);
        EXPECT_NEAR(nll_score(make_mixture({1.0}, {mu}, {sigma}), z), nll_score(make_gaussian(mu, sigma), z), 1e-12);
    }
}

TEST(NllScore, GridExactAtNodesAndInfiniteOutside) {
    std::vector<double> dens{0.0, 0.25, 0.5, 0.25, 0.0};
    const auto d = make_gridded_density(-2.0, 2.0, dens);
    EXPECT_EQ(nll_score(d, 0.0), -std::log(0.5));
    EXPECT_EQ(nll_score(d, -1.0), -std::log(0.25));
    EXPECT_EQ(nll_score(d, -2.0), kInf);
    EXPECT_EQ(nll_score(d, 3.0), kInf);
}

TEST(ConformalThreshold, Examples) {
    std::vector<double> nine;
    for (int i = 1; i <= 9; ++i) nine.push_back(0.1 * i);
    EXPECT_DOUBLE_EQ(conformal_threshold(nine, 0.1), 0.9);
    EXPECT_EQ(conformal_threshold(std::vector<double>{1.0}, 0.5), 1.0);
    EXPECT_EQ(conformal_threshold(std::vector<double>{1.0, 2.0, 3.0}, 0.01), kInf);
}

TEST(ConformalThreshold, Errors) {
    EXPECT_THROW(conformal_threshold(std::vector<double>{}, 0.1), Error);
    EXPECT_THROW(conformal_threshold(std::vector<double>{1.0}, 0.0), Error);
    EXPECT_THROW(conformal_threshold(std::vector<double>{1.0}, 1.0), Error);
}

TEST(ConformalThreshold, OrderIndependent) {
    std::vector<double> a{5.0, 1.0, 4.0, 2.0, 3.0}, b{1.0, 2.0, 3.0, 4.0, 5.0};
    for (double alpha : {0.1, 0.3, 0.5, 0.7})
        EXPECT_EQ(conformal_threshold(a, alpha), conformal_threshold_sorted(b, alpha));
}

TEST(ConformalCalibrator, ThresholdsNonIncreasingInAlpha) {
    RandomStream rng(8, 0);
    std::vector<double> cal(500);
    for (auto& s : cal) s = nll_score(make_gaussian(0, 1), rng.normal());
    const auto alphas = alpha_grid(0.01, 0.99, 0.01);
    const ConformalCalibrator c(cal, alphas);
    EXPECT_EQ(c.n_cal, 500);
    for (std::size_t i = 1; i < c.thresholds.size(); ++i) EXPECT_LE(c.thresholds[i], c.thresholds[i - 1]);
    EXPECT_EQ(c.threshold_at(0.5), conformal_threshold(cal, 0.5));
}

TEST(CoverageCurve, HandExample) {
    const auto curve =
        coverage_curve(std::vector<double>{1.0, 2.0, 3.0}, std::vector<double>{1.5, 2.5}, std::vector<double>{0.5});
    EXPECT_EQ(curve.empirical, (std::vector<double>{0.5}));
}

TEST(CoverageCurve, EverythingCoveredBelowCalibrationMinimum) {
    std::vector<double> cal{1.0, 2.0, 3.0, 4.0, 5.0}, eval{0.1, 0.2, 0.5};
    const auto alphas = alpha_grid(0.2, 0.8, 0.1);
    const auto curve = coverage_curve(cal, eval, alphas);
    for (double c : curve.empirical) EXPECT_EQ(c, 1.0);
}

TEST(CoverageCurve, Errors) {
    const std::vector<double> one{1.0}, none{};
    EXPECT_THROW(coverage_curve(none, one, one), Error);
    EXPECT_THROW(coverage_curve(one, none, std::vector<double>{0.5}), Error);
}

TEST(CoverageCurve, ExchangeableScoresTrackTheDiagonal) {
    // known score distribution: cal and eval are iid exponential. For one
    // calibration set the coverage at alpha has sd ~ sqrt(alpha(1-alpha)/n_cal),
    // about 0.016 at n_cal = 1000, so the curve is averaged over 25 sets before
    // comparing it with the diagonal at every alpha.
    RandomStream rng(2025, 0);
    const auto alphas = alpha_grid(0.01, 0.99, 0.01);
    std::vector<double> mean(alphas.size(), 0.0);
    const int sets = 25;
    for (int k = 0; k < sets; ++k) {
        std::vector<double> cal(1000), eval(4000);
        for (auto& s : cal) s = -std::log(rng.uniform_open());
        for (auto& s : eval) s = -std::log(rng.uniform_open());
        const auto curve = coverage_curve(cal, eval, alphas);
        for (std::size_t i = 0; i < alphas.size(); ++i) mean[i] += curve.empirical[i] / sets;
        // a single set stays inside the band at the headline levels
        for (double a : {0.1, 0.5, 0.9}) {
            const auto i = static_cast<std::size_t>(std::lround(a * 100.0)) - 1;
            EXPECT_NEAR(curve.empirical[i], 1.0 - a, 0.05) << "set " << k << " alpha " << a;
        }
    }
    for (std::size_t i = 0; i < alphas.size(); ++i) EXPECT_NEAR(mean[i], 1.0 - alphas[i], 0.03);
}

TEST(CoverageCurve, MarginalGuaranteeOverManySplits) {
    // averaged over splits, coverage at alpha is >= 1 - alpha
    RandomStream rng(11, 0);
    const std::vector<double> alphas{0.1, 0.5};
    double mean[2] = {0.0, 0.0};
    const int splits = 300;
    for (int split = 0; split < splits; ++split) {
        std::vector<double> cal(50), eval(50);
        for (auto& s : cal) s = rng.normal();
        for (auto& s : eval) s = rng.normal();
        const auto c = coverage_curve(cal, eval, alphas);
        mean[0] += c.empirical[0] / splits;
        mean[1] += c.empirical[1] / splits;
    }
    // standard error of the split average is about 0.003
    EXPECT_GE(mean[0], 0.9 - 0.01);
    EXPECT_GE(mean[1], 0.5 - 0.01);
}

TEST(CoverageCurve, MonotoneInAlpha) {
    RandomStream rng(12, 0);
    std::vector<double> cal(300), eval(700);
    for (auto& s : cal) s = rng.normal();
    for (auto& s : eval) s = rng.normal() * 1.3;
    const auto curve = coverage_curve(cal, eval, alpha_grid(0.01, 0.99, 0.01));
    for (std::size_t i = 1; i < curve.empirical.size(); ++i)
        EXPECT_LE(curve.empirical[i], curve.empirical[i - 1]);
}

TEST(CalibrationDeviance, PerfectDiagonalIsZero) {
    CoverageCurve c;
    c.alphas = alpha_grid(0.01, 0.99, 0.01);
    for (double a : c.alphas) c.empirical.push_back(1.0 - a);
    EXPECT_NEAR(calibration_deviance(c).value, 0.0, 1e-12);
}

TEST(CalibrationDeviance, ConstantOffsetIsOffsetTimesLength) {
    // |gap| = 0.1 everywhere, kept inside [0, 1]
    CoverageCurve c;
    c.alphas = alpha_grid(0.01, 0.99, 0.01);
    for (double a : c.alphas) {
        const double nominal = 1.0 - a;
        c.empirical.push_back(nominal >= 0.1 ? nominal - 0.1 : nominal + 0.1);
    }
    const auto d = calibration_deviance(c);
    EXPECT_NEAR(d.value, 0.098, 1e-9);
    EXPECT_DOUBLE_EQ(d.alpha_lo, 0.01);
    EXPECT_DOUBLE_EQ(d.alpha_hi, 0.99);
}

TEST(CalibrationDeviance, NeedsTwoPoints) {
    CoverageCurve c{{0.5}, {0.5}};
    EXPECT_THROW(calibration_deviance(c), Error);
}

TEST(AlphaGrid, DefaultGrid) {
    const auto g = alpha_grid(0.01, 0.99, 0.01);
    ASSERT_EQ(g.size(), 99u);
    EXPECT_DOUBLE_EQ(g.front(), 0.01);
    EXPECT_DOUBLE_EQ(g.back(), 0.99);
    EXPECT_NEAR(g[49], 0.5, 1e-12);
}

TEST(PredictionSet, InfiniteThresholdIsWholeDomain) {
    const auto s = prediction_set_size(make_gaussian(0, 1), kInf, -5.0, 5.0, 1000);
    EXPECT_EQ(s.size, 10.0);
    EXPECT_EQ(s.n_components, 1);
}

TEST(PredictionSet, ThresholdBelowMinimumIsEmpty) {
    const auto s = prediction_set_size(make_gaussian(0, 1), 0.5, -5.0, 5.0, 1000);
    EXPECT_EQ(s.size, 0.0);
    EXPECT_EQ(s.n_components, 0);
}

TEST(PredictionSet, SeparatedMixtureSplitsInTwo) {
    const auto mix = make_mixture({0.5, 0.5}, {-2.0, 2.0}, {0.2, 0.2});
    RandomStream rng(4, 0);
    const auto draws = draw_samples(mix, 1000, rng);
    std::vector<double> cal;
    for (double z : draws) cal.push_back(nll_score(mix, z));
    const double q = conformal_threshold(cal, 0.1);
    const auto s = prediction_set_size(mix, q, -5.0, 5.0, 1000);
    EXPECT_EQ(s.n_components, 2);
    // two 90% intervals of half-width 1.645 sigma
    EXPECT_NEAR(s.size, 2 * 2 * 1.645 * 0.2, 0.1);
}

TEST(PredictionSet, UnsupportedFamily) {
    EXPECT_THROW(prediction_set_size(make_point(0.0), 1.0, -5.0, 5.0, 100), Error);
}

TEST(PredictionSet, SizeGrowsWithThreshold) {
    const auto mix = make_mixture({0.3, 0.7}, {-1.5, 2.0}, {0.5, 0.8});
    const auto scores = nll_on_grid(mix, -5.0, 5.0, 1000);
    const double spacing = 10.0 / 999.0;
    double prev = -1.0;
    for (double q = 0.0; q < 10.0; q += 0.25) {
        const auto s = prediction_set_from_scores(scores, q, spacing);
        EXPECT_GE(s.size, prev);
        EXPECT_EQ(s.size, prediction_set_size(mix, q, -5.0, 5.0, 1000).size);
        prev = s.size;
    }
}

TEST(ConditionalCoverage, AllCoveredGivesOnesAndEmptyBinsAbsent) {
    std::vector<EventRecord> ev{{0, 0.5, 0}, {1, 1.5, 0}, {2, 1.7, 0}};
    std::vector<double> scores{0.1, 0.2, 0.3};
    const auto bins = conditional_coverage(ev, scores, 1.0, std::vector<double>{0.0, 1.0, 2.0, 3.0});
    ASSERT_EQ(bins.size(), 3u);
    EXPECT_EQ(bins[0].coverage, 1.0);
    EXPECT_EQ(bins[0].count, 1);
    EXPECT_EQ(bins[1].coverage, 1.0);
    EXPECT_EQ(bins[1].count, 2);
    EXPECT_FALSE(bins[2].coverage.has_value());
    EXPECT_FALSE(bins[2].binom_se.has_value());
    EXPECT_EQ(bins[2].count, 0);
}

TEST(ConditionalCoverage, SingleBinReproducesMarginal) {
    RandomStream rng(21, 0);
    std::vector<double> cal(200), eval(800);
    std::vector<EventRecord> ev;
    for (auto& s : cal) s = rng.normal();
    for (std::size_t i = 0; i < eval.size(); ++i) {
        eval[i] = rng.normal();
        ev.push_back({static_cast<std::int64_t>(i), rng.uniform() * 10.0, 0.0});
    }
    const double q = conformal_threshold(cal, 0.2);
    const auto marginal = coverage_curve(cal, eval, std::vector<double>{0.2}).empirical[0];
    const auto bins = conditional_coverage(ev, eval, q, std::vector<double>{0.0, 10.0});
    ASSERT_EQ(bins.size(), 1u);
    EXPECT_EQ(bins[0].count, 800);
    EXPECT_DOUBLE_EQ(*bins[0].coverage, marginal);
    EXPECT_NEAR(*bins[0].binom_se, std::sqrt(marginal * (1 - marginal) / 800.0), 1e-12);
}

}  // namespace
}  // namespace posteval
