#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "posteval/types.hpp"

namespace posteval {
namespace {

TEST(SampleEnsemble, SortsOnConstruction) {
    const auto d = make_sample_ensemble({3.0, 1.0, 2.0});
    const auto& e = std::get<SampleEnsemble>(d);
    EXPECT_EQ(std::vector<double>(e.sorted().begin(), e.sorted().end()), (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(SampleEnsemble, Singleton) {
    const auto d = make_sample_ensemble({5.0});
    EXPECT_EQ(std::get<SampleEnsemble>(d).size(), 1u);
    EXPECT_EQ(std::get<SampleEnsemble>(d).sorted()[0], 5.0);
}

TEST(SampleEnsemble, RejectsEmptyAndNonFinite) {
    try {
        make_sample_ensemble({});
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "empty ensemble");
    }
    try {
        make_sample_ensemble({1.0, std::numeric_limits<double>::quiet_NaN()});
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "non-finite sample");
    }
    EXPECT_THROW(make_sample_ensemble({std::numeric_limits<double>::infinity()}), Error);
}

TEST(SampleEnsemble, PermutationInvariant) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(1 + trial);
        for (auto& x : v) x = normal(rng);
        auto shuffled = v;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        EXPECT_EQ(make_sample_ensemble(v), make_sample_ensemble(shuffled));
    }
}

TEST(Gaussian, RejectsNonPositiveSigma) {
    EXPECT_THROW(make_gaussian(0.0, 0.0), Error);
    EXPECT_THROW(make_gaussian(0.0, -1.0), Error);
    EXPECT_THROW(make_gaussian(std::nan(""), 1.0), Error);
    EXPECT_NO_THROW(make_gaussian(0.0, 1e-300));
}

TEST(Mixture, Invariants) {
    EXPECT_NO_THROW(make_mixture({0.5, 0.5}, {-1, 1}, {1, 1}));
    EXPECT_THROW(make_mixture({0.5, 0.6}, {-1, 1}, {1, 1}), Error);
    EXPECT_THROW(make_mixture({1.0 + 1e-11}, {0}, {1}), Error);
    EXPECT_NO_THROW(make_mixture({1.0 + 1e-13}, {0}, {1}));
    EXPECT_THROW(make_mixture({-0.5, 1.5}, {-1, 1}, {1, 1}), Error);
    EXPECT_THROW(make_mixture({0.5, 0.5}, {-1, 1}, {1, 0}), Error);
    EXPECT_THROW(make_mixture({0.5, 0.5}, {-1}, {1, 1}), Error);
    EXPECT_THROW(make_mixture({}, {}, {}), Error);
}

TEST(GriddedDensity, Invariants) {
    // uniform density on [0, 2]
    EXPECT_NO_THROW(make_gridded_density(0.0, 2.0, std::vector<double>(11, 0.5)));
    EXPECT_THROW(make_gridded_density(0.0, 2.0, std::vector<double>(11, 0.6)), Error);
    EXPECT_THROW(make_gridded_density(2.0, 0.0, std::vector<double>(11, 0.5)), Error);
    std::vector<double> neg(11, 0.5);
    neg[3] = -0.1;
    neg[4] = 1.1;
    EXPECT_THROW(make_gridded_density(0.0, 2.0, neg), Error);
    EXPECT_THROW(make_gridded_density(0.0, 2.0, {1.0}), Error);
}

TEST(GriddedDensity, InterpolatesAndIsExactAtNodes) {
    const auto d = std::get<GriddedDensity>(make_gridded_density(0.0, 2.0, {0.0, 1.0, 0.0}));
    EXPECT_EQ(d.at(0.0), 0.0);
    EXPECT_EQ(d.at(1.0), 1.0);
    EXPECT_DOUBLE_EQ(d.at(0.5), 0.5);
    EXPECT_DOUBLE_EQ(d.at(1.25), 0.75);
    EXPECT_EQ(d.at(-0.1), 0.0);
    EXPECT_EQ(d.at(2.1), 0.0);
}

TEST(Histogram, Validate) {
    Histogram h{{0.0, 1.0, 2.0}, {1, 2}, 0, 0};
    EXPECT_NO_THROW(h.validate());
    EXPECT_EQ(h.total(), 3);
    Histogram bad_edges{{0.0, 0.0, 2.0}, {1, 2}, 0, 0};
    EXPECT_THROW(bad_edges.validate(), Error);
    Histogram bad_len{{0.0, 1.0, 2.0}, {1}, 0, 0};
    EXPECT_THROW(bad_len.validate(), Error);
}

TEST(CoverageCurve, Validate) {
    CoverageCurve ok{{0.1, 0.5}, {0.9, 0.5}};
    EXPECT_NO_THROW(ok.validate());
    CoverageCurve not_increasing{{0.5, 0.1}, {0.5, 0.9}};
    EXPECT_THROW(not_increasing.validate(), Error);
    CoverageCurve out_of_range{{0.0, 0.5}, {1.0, 0.5}};
    EXPECT_THROW(out_of_range.validate(), Error);
    CoverageCurve bad_cov{{0.1, 0.5}, {1.1, 0.5}};
    EXPECT_THROW(bad_cov.validate(), Error);
}

TEST(Events, DuplicateIdsAndNonFinite) {
    std::vector<EventRecord> ev{{0, 1.0, 0.5}, {1, 2.0, 1.0}};
    EXPECT_NO_THROW(validate_events(ev));
    ev.push_back({1, 3.0, 1.0});
    EXPECT_THROW(validate_events(ev), Error);
    std::vector<EventRecord> nan_ev{{0, std::nan(""), 0.5}};
    EXPECT_THROW(validate_events(nan_ev), Error);
}

TEST(Family, NamesAndDensity) {
    EXPECT_EQ(family_name(make_point(0)), "point");
    EXPECT_EQ(family_name(make_gaussian(0, 1)), "gaussian");
    EXPECT_EQ(family_name(make_sample_ensemble({1})), "samples");
    EXPECT_FALSE(has_density(make_point(0)));
    EXPECT_FALSE(has_density(make_sample_ensemble({1})));
    EXPECT_TRUE(has_density(make_gaussian(0, 1)));
    EXPECT_TRUE(has_density(make_mixture({1}, {0}, {1})));
}

}  // namespace
}  // namespace posteval
