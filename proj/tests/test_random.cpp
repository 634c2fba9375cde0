#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "posteval/random.hpp"

namespace posteval {
namespace {

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswers) {
    EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (PhiloxBlock{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (PhiloxBlock{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (PhiloxBlock{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, Reproducible) {
    RandomStream a(7, stream_id(StreamTag::CrpsEnsemble, 3));
    RandomStream b(7, stream_id(StreamTag::CrpsEnsemble, 3));
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, StreamsDiffer) {
    RandomStream a(7, stream_id(StreamTag::CrpsEnsemble, 3));
    RandomStream b(7, stream_id(StreamTag::SingleDraw, 3));
    RandomStream c(8, stream_id(StreamTag::CrpsEnsemble, 3));
    const auto va = a.next_u64();
    EXPECT_NE(va, b.next_u64());
    EXPECT_NE(va, c.next_u64());
}

TEST(RandomStream, UniformAndNormalMoments) {
    RandomStream rng(42, 0);
    const int n = 200000;
    double su = 0, su2 = 0, sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        su2 += u * u;
        const double g = rng.normal();
        sn += g;
        sn2 += g * g;
    }
    EXPECT_NEAR(su / n, 0.5, 0.005);
    EXPECT_NEAR(su2 / n - (su / n) * (su / n), 1.0 / 12.0, 0.002);
    EXPECT_NEAR(sn / n, 0.0, 0.01);
    EXPECT_NEAR(sn2 / n, 1.0, 0.01);
}

TEST(RandomStream, OpenUniformNeverZero) {
    RandomStream rng(0, 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform_open();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

}  // namespace
}  // namespace posteval
