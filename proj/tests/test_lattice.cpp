#include "fixtures.hpp"

#include "seqopt/errors.hpp"
#include "seqopt/lattice.hpp"

#include <gtest/gtest.h>

using namespace seqopt;
using namespace seqopt::testing;

TEST(Lattice, CountStageSizes) {
    const StateLattice lat(ProcessModel(ternary().model), 5);
    EXPECT_EQ(lat.kind(), StateKind::counts);
    for (int m = 0; m <= 5; ++m) EXPECT_EQ(lat.stage(m).size, static_cast<std::size_t>((m + 1) * (m + 2) / 2));
}

TEST(Lattice, SuccessorsAndPredecessorsAreConsistent) {
    const StateLattice lat(ProcessModel(ternary().model), 4);
    for (int m = 0; m < 4; ++m) {
        const auto& st = lat.stage(m);
        for (std::size_t s = 0; s < st.size; ++s) {
            for (int a = 0; a < 3; ++a) {
                const auto t = st.successor[s * 3 + static_cast<std::size_t>(a)];
                auto label = lat.label(m, s);
                ++label[static_cast<std::size_t>(a)];
                EXPECT_EQ(lat.label(m + 1, t), label);
                EXPECT_EQ(lat.stage(m + 1).predecessor[t * 3 + static_cast<std::size_t>(a)], s);
            }
        }
    }
}

TEST(Lattice, FindInvertsLabel) {
    const StateLattice lat(ProcessModel(main_bernoulli_model()), 6, StateKind::histories);
    for (std::size_t s = 0; s < lat.stage(6).size; ++s) EXPECT_EQ(lat.find(6, lat.label(6, s)), s);
    EXPECT_FALSE(lat.find(6, {0, 1}).has_value());
}

TEST(Lattice, DensitiesMatchModel) {
    const ProcessModel m = three_bernoulli_mixture().model;
    const StateLattice counts(m, 5);
    const StateLattice hist(m, 5, StateKind::histories);
    for (std::size_t s = 0; s < hist.stage(5).size; ++s) {
        const auto x = hist.label(5, s);
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(hist.density(5, i)[s], joint_density(m, i, x), 1e-15);
        EXPECT_NEAR(hist.stage(5).asn[s], asn_density(m, x), 1e-15);
        const auto c = counts.find(5, counts_of(x, 2).counts);
        ASSERT_TRUE(c.has_value());
        EXPECT_NEAR(counts.density(5, 1)[*c], joint_density(m, 1, x), 1e-15);
    }
}

TEST(Lattice, ExtendAppendsWithoutReindexing) {
    StateLattice lat(ProcessModel(main_bernoulli_model()), 3);
    const auto before = lat.stage(3).density;
    lat.extend(7);
    EXPECT_EQ(lat.horizon(), 7);
    EXPECT_EQ(lat.stage(3).density, before);
}

TEST(Lattice, CountsRequireIid) {
    EXPECT_THROW(StateLattice(markov_chain().model, 3, StateKind::counts), ValidationError);
    EXPECT_THROW(StateLattice(markov_chain(4).model, 5), ValidationError);
}

TEST(Lattice, StateCapGuard) {
    LatticeLimits limits;
    limits.state_cap = 100;
    EXPECT_THROW(StateLattice(ProcessModel(main_bernoulli_model()), 10, StateKind::histories, limits),
                 NumericalGuardError);
}

TEST(Lattice, UnderflowGuard) {
    const ProcessModel m = bernoulli({{0.99, 0.01}, {0.5, 0.5}}, {{{0.5, 0.5}, 1.0}});
    EXPECT_NO_THROW(StateLattice(m, 100));
    EXPECT_THROW(StateLattice(m, 200), NumericalGuardError);
}
