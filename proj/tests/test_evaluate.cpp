#include "fixtures.hpp"
#include "oracles.hpp"

#include "seqopt/errors.hpp"
#include "seqopt/evaluate.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace seqopt;
using namespace seqopt::testing;

namespace {

void expect_oc_near(const OperatingCharacteristics& a, const OperatingCharacteristics& b, double tol) {
    ASSERT_EQ(a.k, b.k);
    for (int i = 0; i < a.k; ++i) {
        for (int j = 0; j < a.k; ++j) EXPECT_NEAR(a.alpha[i][j], b.alpha[i][j], tol);
        EXPECT_NEAR(a.beta[i], b.beta[i], tol);
        EXPECT_NEAR(a.asn_accept[i], b.asn_accept[i], tol);
    }
    for (int i = 0; i <= a.k; ++i) {
        EXPECT_NEAR(a.asn[i], b.asn[i], tol);
        EXPECT_NEAR(a.stop_mass_deficit[i], b.stop_mass_deficit[i], tol);
    }
    EXPECT_NEAR(a.lagrangian, b.lagrangian, tol * std::max(1.0, a.lagrangian));
}

void expect_well_formed(const OperatingCharacteristics& oc) {
    for (int i = 0; i < oc.k; ++i) {
        double row = 0.0, beta = 0.0;
        for (int j = 0; j < oc.k; ++j) {
            EXPECT_GE(oc.alpha[i][j], 0.0);
            EXPECT_LE(oc.alpha[i][j], 1.0 + 1e-15);
            row += oc.alpha[i][j];
            if (j != i) beta += oc.alpha[i][j];
        }
        EXPECT_NEAR(row, 1.0 - oc.stop_mass_deficit[i], 1e-10);
        EXPECT_NEAR(oc.beta[i], beta, 1e-15);
    }
}

} // namespace

TEST(ExactOc, StopAtOneAcceptFirst) {
    for (const auto& fx : all_fixtures()) {
        SCOPED_TRACE(fx.name);
        const StateLattice lat(fx.model, 1);
        const auto plan = stop_at_one_plan(lat, 0);
        for (const auto& oc : {exact_oc(lat, plan, fx.weights), oracle_oc(fx.model, plan, fx.weights, 1)}) {
            for (int i = 0; i < oc.k; ++i) {
                EXPECT_NEAR(oc.alpha[i][0], 1.0, 1e-15);
                EXPECT_NEAR(oc.beta[i], i == 0 ? 0.0 : 1.0, 1e-15);
                EXPECT_NEAR(oc.asn[i], 1.0, 1e-15);
            }
            EXPECT_NEAR(oc.mixture_asn(), 1.0, 1e-15);
        }
    }
}

TEST(ExactOc, ContinueUntilHorizonHasAsnN) {
    for (const auto& fx : all_fixtures()) {
        SCOPED_TRACE(fx.name);
        const StateLattice lat(fx.model, 5);
        const auto plan = continue_until_plan(lat, 5);
        for (const auto& oc : {exact_oc(lat, plan, fx.weights), oracle_oc(fx.model, plan, fx.weights, 5)}) {
            for (int i = 0; i <= oc.k; ++i) EXPECT_NEAR(oc.asn[i], 5.0, 1e-12);
        }
    }
}

TEST(ExactOc, MatchesOracleOnEveryFixture) {
    std::mt19937_64 rng(2024);
    for (const auto& fx : all_fixtures()) {
        SCOPED_TRACE(fx.name);
        const StateLattice lat(fx.model, 6);
        for (int N = 1; N <= 6; ++N) {
            const auto d = solve_truncated(lat, fx.weights, N);
            for (bool randomize : {false, true}) {
                const EvaluationOptions options{randomize, randomize};
                expect_oc_near(exact_oc(lat, d.plan, fx.weights, options),
                               oracle_oc(fx.model, d.plan, fx.weights, N, options), 1e-12);
            }
            const auto r = random_plan(lat, N, 0.6, rng);
            expect_oc_near(exact_oc(lat, r, fx.weights), oracle_oc(fx.model, r, fx.weights, N), 1e-12);
        }
    }
}

TEST(ExactOc, LagrangianEqualsDesignValue) {
    for (const auto& fx : all_fixtures()) {
        SCOPED_TRACE(fx.name);
        const int top = max_horizon(fx.model) < 0 ? 8 : max_horizon(fx.model);
        const StateLattice lat(fx.model, top);
        for (int N = 1; N <= top; ++N) {
            const auto d = solve_truncated(lat, fx.weights, N);
            const auto oc = exact_oc(lat, d.plan, fx.weights);
            EXPECT_NEAR(oc.lagrangian, d.values.value, 1e-9);
            expect_well_formed(oc);
            for (double deficit : oc.stop_mass_deficit) EXPECT_EQ(deficit, 0.0);
        }
    }
}

TEST(ExactOc, LagrangianIsSumOfParts) {
    const auto fx = three_bernoulli_mixture();
    const auto d = solve_truncated(fx.model, fx.weights, 7);
    const auto oc = exact_oc(fx.model, d.plan, fx.weights);
    EXPECT_EQ(oc.lagrangian, lagrangian_from_parts(oc, fx.weights));
}

TEST(ExactOc, IdenticalHypothesesGiveIdenticalRows) {
    const auto fx = identical_bernoulli();
    const StateLattice lat(fx.model, 4);
    std::mt19937_64 rng(5);
    const auto plan = random_plan(lat, 4, 0.5, rng);
    const auto oc = exact_oc(lat, plan, fx.weights);
    EXPECT_EQ(oc.alpha[0], oc.alpha[1]);
}

TEST(ExactOc, DeficitForPlansThatKeepSampling) {
    const auto fx = main_bernoulli();
    const StateLattice lat(fx.model, 3);
    auto plan = continue_until_plan(lat, 3);
    plan.stages[3].actions[0] = Action::continue_sampling;  // all-zeros history keeps going
    const auto oc = exact_oc(lat, plan, fx.weights);
    EXPECT_NEAR(oc.stop_mass_deficit[0], 0.7 * 0.7 * 0.7, 1e-15);
    EXPECT_NEAR(oc.stop_mass_deficit[2], 0.125, 1e-15);
    expect_well_formed(oc);
    expect_oc_near(oc, oracle_oc(fx.model, plan, fx.weights, 3), 1e-14);
}

TEST(ExactOc, RandomisedDecisionTiesSplitEvenly) {
    const auto fx = identical_bernoulli();
    const StateLattice lat(fx.model, 2);
    const auto plan = solve_truncated(lat, fx.weights, 2).plan;
    const auto oc = exact_oc(lat, plan, fx.weights, {false, true});
    EXPECT_NEAR(oc.alpha[0][0], 0.5, 1e-15);
    EXPECT_NEAR(oc.alpha[1][0], 0.5, 1e-15);
}

TEST(ExactOc, RejectsMismatchedPlans) {
    const auto fx = main_bernoulli();
    const StateLattice lat(fx.model, 3);
    auto plan = continue_until_plan(lat, 3);
    plan.stages[2].actions.pop_back();
    EXPECT_THROW(exact_oc(lat, plan, fx.weights), ValidationError);
    const StateLattice short_lat(fx.model, 2);
    EXPECT_THROW(exact_oc(short_lat, continue_until_plan(lat, 3), fx.weights), ValidationError);
}

TEST(OracleOc, EnumerationCap) {
    const auto fx = main_bernoulli();
    const StateLattice lat(fx.model, 12);
    EXPECT_THROW(oracle_oc(fx.model, continue_until_plan(lat, 12), fx.weights, 12, {}, 1000), NumericalGuardError);
}

TEST(TrivialOc, NoObservations) {
    const auto oc = trivial_oc(LagrangeWeights::general({{0, 3}, {5, 0}}));
    EXPECT_EQ(oc.mixture_asn(), 0.0);
    EXPECT_EQ(oc.alpha[0][1], 1.0);
    EXPECT_EQ(oc.alpha[1][1], 1.0);
    EXPECT_EQ(oc.lagrangian, 3.0);
}

TEST(Diagnostic, IdenticalHypothesesFail) {
    const Fixture fx{"identical", bernoulli({{0.4, 0.6}, {0.4, 0.6}}, {{{0.5, 0.5}, 1.0}}), LagrangeWeights::uniform(2, 1.0)};
    const auto d = truncatability_diagnostic(fx.model, LagrangeWeights::uniform(2, 1.0), 10);
    ASSERT_EQ(d.points.size(), 10u);
    for (const auto& p : d.points) EXPECT_NEAR(p.integral, 1.0, 1e-12);
    EXPECT_FALSE(d.pass);
    EXPECT_FALSE(d.bayesian);
}

TEST(Diagnostic, AsnAtAHypothesisIsBayesian) {
    const auto fx = identical_bernoulli();
    const auto d = truncatability_diagnostic(fx.model, fx.weights, 10);
    EXPECT_TRUE(d.bayesian);
    EXPECT_TRUE(d.pass);
}

TEST(Diagnostic, ZeroWeightsPass) {
    const auto fx = main_bernoulli(0.0);
    const auto d = truncatability_diagnostic(fx.model, fx.weights, 5);
    for (const auto& p : d.points) EXPECT_EQ(p.integral, 0.0);
    EXPECT_TRUE(d.pass);
}

TEST(Diagnostic, DistinctHypothesesPass) {
    const auto fx = main_bernoulli();
    const auto d = truncatability_diagnostic(fx.model, fx.weights, 256);
    EXPECT_TRUE(d.pass);
    EXPECT_LT(d.points.back().integral, d.threshold);
    EXPECT_TRUE(is_bayesian_mixture(markov_chain().model));
    EXPECT_FALSE(is_bayesian_mixture(fx.model));
}

TEST(Dominance, CompetitorsWithSmallerErrorsNeedMoreObservations) {
    std::mt19937_64 rng(99);
    for (const auto& fx : {main_bernoulli(), three_bernoulli()}) {
        SCOPED_TRACE(fx.name);
        const StateLattice lat(fx.model, 6);
        const auto d = solve_truncated(lat, fx.weights, 6);
        const auto base = exact_oc(lat, d.plan, fx.weights);
        for (int t = 0; t < 100; ++t) {
            const auto plan = t % 2 ? random_plan(lat, 6, 0.7, rng) : perturbed_plan(d.plan, 0.1, 0.02, rng);
            const auto oc = exact_oc(lat, plan, fx.weights);
            EXPECT_GE(oc.lagrangian, d.values.value - 1e-10);
            bool dominates = true;
            for (int i = 0; i < oc.k; ++i)
                for (int j = 0; j < oc.k; ++j)
                    if (i != j && oc.alpha[i][j] > base.alpha[i][j]) dominates = false;
            if (dominates) EXPECT_GE(oc.mixture_asn(), base.mixture_asn() - 1e-10);
        }
    }
}
