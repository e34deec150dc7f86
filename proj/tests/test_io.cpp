#include "fixtures.hpp"

#include "seqopt/errors.hpp"
#include "seqopt/io.hpp"

#include <gtest/gtest.h>

using namespace seqopt;
using namespace seqopt::testing;
using seqopt::io::json;

namespace {

json bernoulli_config() {
    return json::parse(R"({
      "schema": 1, "alphabet": 2,
      "hypotheses": [[0.7, 0.3], [0.3, 0.7]],
      "asn": {"mixture": [{"pmf": [0.5, 0.5], "weight": 1}]},
      "lambda": [[0, 100], [100, 0]]
    })");
}

} // namespace

TEST(ParseModel, IidConfig) {
    const auto model = io::parse_model(bernoulli_config());
    ASSERT_TRUE(std::holds_alternative<IidModel>(model));
    EXPECT_EQ(std::get<IidModel>(model).pmf(1)[1], 0.7);
    EXPECT_EQ(hypotheses_of(model).label(0), "H1");
}

TEST(ParseModel, ProbabilitiesKeepEveryDigit) {
    auto config = bernoulli_config();
    config["hypotheses"] = json::parse("[[0.123456789012345, 0.876543210987655], [0.3, 0.7]]");
    const auto model = io::parse_model(config);
    EXPECT_EQ(std::get<IidModel>(model).pmf(0)[0], 0.123456789012345);
}

TEST(ParseModel, MixtureByHypothesisIndex) {
    auto config = bernoulli_config();
    config["asn"] = json::parse(R"({"mixture": [{"hypothesis": 1, "weight": 0.5}, {"hypothesis": 2, "weight": 0.5}]})");
    const auto model = io::parse_model(config);
    EXPECT_TRUE(is_bayesian_mixture(model));
    config["asn"]["mixture"][0]["hypothesis"] = 3;
    EXPECT_THROW(io::parse_model(config), ValidationError);
}

TEST(ParseModel, JointTables) {
    const auto config = json::parse(R"({
      "alphabet": 2,
      "joint_tables": {
        "1": {"0": 0.5, "1": 0.5, "00": 0.4, "01": 0.1, "10": 0.15, "11": 0.35},
        "2": {"0": 0.5, "1": 0.5, "00": 0.25, "01": 0.25, "10": 0.25, "11": 0.25}
      },
      "asn": {"mixture": [{"hypothesis": 2}]}
    })");
    const auto model = io::parse_model(config);
    ASSERT_TRUE(std::holds_alternative<JointTableModel>(model));
    EXPECT_EQ(max_horizon(model), 2);
    EXPECT_EQ(joint_density(model, 0, History{1, 0}), 0.15);
}

TEST(ParseModel, RejectsMalformedConfigs) {
    auto c = bernoulli_config();
    c.erase("asn");
    EXPECT_THROW(io::parse_model(c), ValidationError);
    c = bernoulli_config();
    c["hypotheses"][0] = json::parse("[0.7, 0.4]");
    EXPECT_THROW(io::parse_model(c), ValidationError);
    c = bernoulli_config();
    c["schema"] = 2;
    EXPECT_THROW(io::parse_model(c), ValidationError);
    c = bernoulli_config();
    c["asn"]["mixture"][0]["colour"] = "red";
    EXPECT_THROW(io::parse_model(c), ValidationError);
    c = bernoulli_config();
    c["labels"] = json::parse(R"(["a"])");
    EXPECT_THROW(io::parse_model(c), ValidationError);
}

TEST(ParseWeights, Forms) {
    auto c = bernoulli_config();
    EXPECT_EQ(io::parse_weights(c, 2)(1, 0), 100.0);
    c["lambda"] = 7.5;
    EXPECT_EQ(io::parse_weights(c, 2)(0, 1), 7.5);
    c.erase("lambda");
    c["lambda_rows"] = json::parse("[3, 4]");
    const auto w = io::parse_weights(c, 2);
    EXPECT_EQ(w.kind(), ProblemKind::row_constant);
    EXPECT_EQ(w(1, 0), 4.0);
    c["lambda"] = 1;
    EXPECT_THROW(io::parse_weights(c, 2), ValidationError);
}

TEST(ParseTargets, BothProblems) {
    const auto t1 = io::parse_targets(json::parse(R"({"kind": "problem1", "alpha": [[0, 0.05], [0.05, 0]]})"));
    EXPECT_EQ(t1.kind, ProblemKind::general);
    EXPECT_EQ(t1.slack, 0.02);
    const auto t2 = io::parse_targets(json::parse(R"({"kind": "problem2", "beta": [0.1, 0.2], "slack": 0.05})"));
    EXPECT_EQ(t2.kind, ProblemKind::row_constant);
    EXPECT_EQ(t2.slack, 0.05);
    EXPECT_THROW(io::parse_targets(json::parse(R"({"kind": "problem3"})")), ValidationError);
}

TEST(DesignSettings, Defaults) {
    const auto s = io::parse_design_settings(bernoulli_config());
    EXPECT_EQ(s.mode, io::DesignMode::limit);
    EXPECT_EQ(s.solver.N_start, 4);
    EXPECT_EQ(s.solver.N_step, 4);
    EXPECT_EQ(s.solver.N_max, 512);
    EXPECT_EQ(s.solver.tolerance, 1e-8);
    auto c = bernoulli_config();
    c["design"] = json::parse(R"({"mode": "truncated", "N": 3, "state_cap": 1000})");
    const auto t = io::parse_design_settings(c);
    EXPECT_EQ(t.mode, io::DesignMode::truncated);
    EXPECT_EQ(t.N, 3);
    EXPECT_EQ(t.solver.limits.state_cap, 1000u);
    c["design"]["Nmax"] = 3;
    EXPECT_THROW(io::parse_design_settings(c), ValidationError);
}

TEST(PlanJson, RoundTrip) {
    for (const auto& fx : {three_bernoulli(), markov_chain(5)}) {
        SCOPED_TRACE(fx.name);
        const StateLattice lat(fx.model, 5);
        const auto d = solve_truncated(lat, fx.weights, 5);
        const auto text = io::dump(io::plan_to_json(d.plan, lat));
        const auto back = io::plan_from_json(json::parse(text), lat);
        for (int m = 1; m <= 5; ++m) {
            const auto& a = d.plan.stages[static_cast<std::size_t>(m)];
            const auto& b = back.stages[static_cast<std::size_t>(m)];
            EXPECT_EQ(a.actions, b.actions);
            for (std::size_t s = 0; s < a.actions.size(); ++s) {
                if (!stops(a.actions[s])) continue;
                EXPECT_EQ(a.decisions[s].accept, b.decisions[s].accept);
                EXPECT_EQ(a.decisions[s].tie_mask, b.decisions[s].tie_mask);
            }
        }
    }
}

TEST(PlanJson, RejectsIncompletePlans) {
    const auto fx = main_bernoulli();
    const StateLattice lat(fx.model, 3);
    auto doc = io::plan_to_json(solve_truncated(lat, fx.weights, 3).plan, lat);
    auto missing = doc;
    missing["stages"][1]["states"].erase(0);
    EXPECT_THROW(io::plan_from_json(missing, lat), ValidationError);
    auto absent = doc;
    absent["stages"][1]["states"][0]["state"] = json::parse("[5, 5]");
    EXPECT_THROW(io::plan_from_json(absent, lat), ValidationError);
    auto bad_action = doc;
    bad_action["stages"][0]["states"][0]["action"] = "pause";
    EXPECT_THROW(io::plan_from_json(bad_action, lat), ValidationError);
}

TEST(Sha256, KnownVector) {
    EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Dump, SortedKeysAndNewline) {
    const auto text = io::dump(json::parse(R"({"b": 1, "a": 2})"));
    EXPECT_LT(text.find("\"a\""), text.find("\"b\""));
    EXPECT_EQ(text.back(), '\n');
}

TEST(Summary, BinaryThresholds) {
    const auto fx = main_bernoulli();
    const StateLattice lat(fx.model, 5);
    const auto d = solve_truncated(lat, fx.weights, 5);
    const auto summary = io::design_summary(d.values, d.plan, lat, triviality_check(fx.weights, d.values.value),
                                            hypotheses_of(fx.model));
    EXPECT_NE(summary.find("m=5:"), std::string::npos);
    EXPECT_NE(summary.find("stop c1 in [0,"), std::string::npos);
}
