#include "fixtures.hpp"
#include "oracles.hpp"

#include "seqopt/errors.hpp"
#include "seqopt/parallel.hpp"
#include "seqopt/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace seqopt;
using namespace seqopt::testing;

namespace {

SimulationOptions options(std::size_t reps, std::uint64_t seed, bool randomize = false) {
    SimulationOptions o;
    o.replications = reps;
    o.seed = seed;
    o.ties = {randomize, randomize};
    return o;
}

} // namespace

TEST(MonteCarlo, StopAtOneIsDegenerate) {
    const auto fx = three_bernoulli();
    const StateLattice lat(fx.model, 1);
    const auto plan = stop_at_one_plan(lat, 0);
    for (int i = 0; i < 3; ++i) {
        const auto e = run_monte_carlo(lat, plan, TrueParameter::hypothesis(i), options(1000, 3));
        EXPECT_EQ(e.accept[0], 1.0);
        EXPECT_EQ(e.accept_se[0], 0.0);
        EXPECT_EQ(e.asn, 1.0);
        EXPECT_EQ(e.asn_se, 0.0);
        EXPECT_EQ(e.replications, 1000u);
    }
}

TEST(MonteCarlo, SingleReplicationGivesOneRealisedLength) {
    const auto fx = main_bernoulli();
    const auto d = solve_limit(fx.model, fx.weights, SolverConfig{});
    const StateLattice lat(fx.model, d.effective_horizon);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto e = run_monte_carlo(lat, d.plan, TrueParameter::mixture(), options(1, seed));
        EXPECT_EQ(e.asn, std::floor(e.asn));
        EXPECT_GE(e.asn, 1.0);
        EXPECT_LE(e.asn, d.effective_horizon);
    }
}

TEST(MonteCarlo, DeterministicAcrossRunsAndThreads) {
    const auto fx = three_bernoulli_mixture();
    const auto d = solve_truncated(fx.model, fx.weights, 12);
    const StateLattice lat(fx.model, 12);
    set_thread_count(1);
    const auto a = run_monte_carlo(lat, d.plan, TrueParameter::mixture(), options(20000, 11));
    set_thread_count(3);
    const auto b = run_monte_carlo(lat, d.plan, TrueParameter::mixture(), options(20000, 11));
    set_thread_count(0);
    EXPECT_EQ(a.accept, b.accept);
    EXPECT_EQ(a.asn, b.asn);
    EXPECT_EQ(a.asn_se, b.asn_se);
    const auto c = run_monte_carlo(lat, d.plan, TrueParameter::mixture(), options(20000, 12));
    EXPECT_NE(a.asn, c.asn);
}

TEST(MonteCarlo, AgreesWithExactOnSeveralModels) {
    for (const auto& fx : {main_bernoulli(), three_bernoulli_mixture(), markov_chain(), ternary()}) {
        SCOPED_TRACE(fx.name);
        const int N = max_horizon(fx.model) < 0 ? 10 : max_horizon(fx.model);
        const StateLattice lat(fx.model, N);
        const auto d = solve_truncated(lat, fx.weights, N);
        const auto exact = exact_oc(lat, d.plan, fx.weights);
        std::vector<TrueParameter> truths;
        for (int i = 0; i < lat.num_hypotheses(); ++i) truths.push_back(TrueParameter::hypothesis(i));
        truths.push_back(TrueParameter::mixture());
        for (const auto& t : truths) {
            const auto e = run_monte_carlo(lat, d.plan, t, options(20000, 5));
            // 4.5 standard errors: a loose gate for a single fixed seed.
            const auto check = compare_with_exact(e, exact, 4.5);
            EXPECT_TRUE(check.agrees) << t.name();
        }
    }
}

TEST(MonteCarlo, RandomisedDecisionTies) {
    const auto fx = identical_bernoulli();
    const StateLattice lat(fx.model, 2);
    const auto plan = solve_truncated(lat, fx.weights, 2).plan;
    const auto e = run_monte_carlo(lat, plan, TrueParameter::hypothesis(0), options(40000, 8, true));
    EXPECT_NEAR(e.accept[0], 0.5, 4.5 * e.accept_se[0]);
    const auto fixed = run_monte_carlo(lat, plan, TrueParameter::hypothesis(0), options(1000, 8, false));
    EXPECT_EQ(fixed.accept[0], 1.0);
}

TEST(MonteCarlo, ErrorShrinksWithReplications) {
    const auto fx = main_bernoulli();
    const auto d = solve_limit(fx.model, fx.weights, SolverConfig{});
    const StateLattice lat(fx.model, d.effective_horizon);
    const auto exact = exact_oc(lat, d.plan, fx.weights);
    double previous = INFINITY;
    for (std::size_t reps : {1000u, 10000u, 100000u}) {
        double total = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto e = run_monte_carlo(lat, d.plan, TrueParameter::mixture(), options(reps, seed));
            total += std::abs(e.asn - exact.mixture_asn());
        }
        EXPECT_LT(total, previous);
        previous = total;
    }
}

TEST(MonteCarlo, RejectsPlansThatRunPastTheirHorizon) {
    const auto fx = main_bernoulli();
    const StateLattice lat(fx.model, 3);
    auto plan = continue_until_plan(lat, 3);
    plan.stages[3].actions[0] = Action::continue_sampling;
    EXPECT_THROW(run_monte_carlo(lat, plan, TrueParameter::hypothesis(0), options(2000, 1)), ValidationError);
    EXPECT_THROW(run_monte_carlo(lat, plan, TrueParameter::hypothesis(5), options(10, 1)), ValidationError);
    EXPECT_THROW(run_monte_carlo(lat, plan, TrueParameter::hypothesis(0), options(0, 1)), ValidationError);
}
