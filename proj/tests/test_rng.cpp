#include "seqopt/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using seqopt::Philox4x64;
using seqopt::ReplicationStream;

// Known-answer vectors for Philox4x64-10, cross-checked against numpy's
// implementation of the same generator.
TEST(Philox, KnownAnswerZero) {
    const auto out = Philox4x64::block({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out[0], 0x16554d9eca36314cULL);
    EXPECT_EQ(out[1], 0xdb20fe9d672d0fdcULL);
    EXPECT_EQ(out[2], 0xd7e772cee186176bULL);
    EXPECT_EQ(out[3], 0x7e68b68aec7ba23bULL);
}

TEST(Philox, KnownAnswerAllOnes) {
    const std::uint64_t ones = ~0ULL;
    const auto out = Philox4x64::block({ones, ones, ones, ones}, {ones, ones});
    EXPECT_EQ(out[0], 0x87b092c3013fe90bULL);
    EXPECT_EQ(out[1], 0x438c3c67be8d0224ULL);
    EXPECT_EQ(out[2], 0x9cc7d7c69cd777b6ULL);
    EXPECT_EQ(out[3], 0xa09caebf594f0ba0ULL);
}

TEST(Philox, KnownAnswerSeedAndReplication) {
    const auto out = Philox4x64::block({5, 0, 0, 0}, {42, 7});
    EXPECT_EQ(out[0], 0xcef8be52de402fc5ULL);
    EXPECT_EQ(out[1], 0x0b9769b3f2779907ULL);
    EXPECT_EQ(out[2], 0x9fd276c06f88cb2bULL);
    EXPECT_EQ(out[3], 0xf0a0b84935fb0e65ULL);
}

TEST(ReplicationStream, WalksBlocksInOrder) {
    ReplicationStream s(42, 7);
    for (std::uint64_t block = 0; block < 6; ++block) {
        const auto expected = Philox4x64::block({block, 0, 0, 0}, {42, 7});
        for (auto word : expected) EXPECT_EQ(s.next_u64(), word);
    }
}

TEST(ReplicationStream, IndependentOfOtherReplications) {
    ReplicationStream a(1, 3), b(1, 3), c(1, 4);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        seen.insert(x);
        seen.insert(c.next_u64());
    }
    EXPECT_EQ(seen.size(), 200u);
}

TEST(ReplicationStream, UniformMoments) {
    ReplicationStream s(9, 0);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = s.next_uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sq += u * u;
    }
    EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(sq / n, 1.0 / 3, 0.005);
}
