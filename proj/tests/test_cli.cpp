#include "cli.hpp"

#include "seqopt/io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using seqopt::io::json;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("seqopt_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) {
        const auto path = (dir_ / name).string();
        std::ofstream(path) << text;
        return path;
    }
    std::string read(const std::string& name) const {
        std::ifstream in(dir_ / name);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(std::vector<std::string> args) {
        args.insert(args.begin(), "seqopt");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        out_.str("");
        err_.str("");
        return seqopt::cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    std::string bernoulli(const std::string& extra = "", const std::string& lambda = "100") {
        return write("config.json", R"({"schema": 1, "alphabet": 2, "hypotheses": [[0.7, 0.3], [0.3, 0.7]],
          "asn": {"mixture": [{"pmf": [0.5, 0.5]}]}, "lambda": )" + lambda + extra + "}");
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

} // namespace

TEST_F(Cli, TruncatedAtOneStopsAtStageOne) {
    const auto config = bernoulli();
    ASSERT_EQ(run({"design", "--config", config, "--out", path("o"), "--mode", "truncated", "--N", "1"}), 0);
    EXPECT_NE(read("o/design_summary.txt").find("stops at stage 1"), std::string::npos);
}

TEST_F(Cli, ZeroWeightsGiveTrivialSummary) {
    const auto config = bernoulli("", "0");
    ASSERT_EQ(run({"design", "--config", config, "--out", path("o"), "--mode", "truncated", "--N", "4"}), 0);
    const auto summary = read("o/design_summary.txt");
    EXPECT_NE(summary.find("trivial design"), std::string::npos);
    EXPECT_NE(summary.find("value 1\n"), std::string::npos);
}

TEST_F(Cli, ThreeStageValueMatchesOracle) {
    const auto config = bernoulli();
    ASSERT_EQ(run({"design", "--config", config, "--out", path("o"), "--mode", "truncated", "--N", "3"}), 0);
    const auto design = json::parse(read("o/design.json"));
    EXPECT_NEAR(design["value"].get<double>(), 45.7, 1e-10);
    EXPECT_EQ(design["schema"], 1);
    EXPECT_TRUE(design.contains("manifest_hash"));
    const auto manifest = json::parse(read("o/design_manifest.json"));
    EXPECT_EQ(manifest["manifest_hash"], design["manifest_hash"]);
}

TEST_F(Cli, EvaluateStopAtOnePlan) {
    const auto config = bernoulli();
    const auto design = write("plan.json", R"({"artifact": "design", "plan": {"horizon": 1, "stages": [
        {"m": 1, "states": [{"state": [1, 0], "action": "stop", "accept": 1},
                            {"state": [0, 1], "action": "stop", "accept": 1}]}]}})");
    ASSERT_EQ(run({"evaluate", "--config", config, "--design", design, "--out", path("o")}), 0) << err_.str();
    const auto oc = json::parse(read("o/oc.json"));
    EXPECT_EQ(oc["asn"][0], 1.0);
    EXPECT_EQ(oc["asn"][2], 1.0);
    EXPECT_EQ(oc["alpha"][1][0], 1.0);
    EXPECT_EQ(oc["beta"][1], 1.0);
}

TEST_F(Cli, DesignRoundTripEvaluatesIdentically) {
    const auto config = bernoulli();
    ASSERT_EQ(run({"design", "--config", config, "--out", path("o")}), 0);
    ASSERT_EQ(run({"evaluate", "--config", config, "--design", path("o/design.json"), "--out", path("o"), "--csv"}), 0);
    const auto design = json::parse(read("o/design.json"));
    const auto oc = json::parse(read("o/oc.json"));

    const auto model = seqopt::io::parse_model(json::parse(read("config.json")));
    const auto weights = seqopt::LagrangeWeights::uniform(2, 100);
    const auto d = seqopt::solve_limit(model, weights, seqopt::SolverConfig{});
    const auto direct = seqopt::exact_oc(model, d.plan, weights);
    EXPECT_EQ(oc["alpha"], json(direct.alpha));
    EXPECT_EQ(oc["asn"], json(direct.asn));
    EXPECT_EQ(oc["lagrangian"].get<double>(), direct.lagrangian);
    EXPECT_NEAR(oc["lagrangian_minus_value"].get<double>(), 0.0, 1e-9);
    EXPECT_NE(read("o/tables.csv").find("m,states"), std::string::npos);
    EXPECT_NE(read("o/trace.csv").find("N,value"), std::string::npos);
}

TEST_F(Cli, SimulateIsByteIdentical) {
    const auto config = bernoulli();
    ASSERT_EQ(run({"simulate", "--config", config, "--out", path("a"), "--reps", "5000", "--seed", "3"}), 0);
    ASSERT_EQ(run({"simulate", "--config", config, "--out", path("b"), "--reps", "5000", "--seed", "3", "--threads",
                   "3"}),
              0);
    EXPECT_EQ(read("a/simulation.json"), read("b/simulation.json"));
    ASSERT_EQ(run({"simulate", "--config", config, "--out", path("c"), "--reps", "5000", "--seed", "4"}), 0);
    EXPECT_NE(read("a/simulation.json"), read("c/simulation.json"));
    ASSERT_EQ(run({"simulate", "--config", config, "--out", path("d"), "--reps", "100", "--true", "2"}), 0);
    EXPECT_EQ(json::parse(read("d/simulation.json"))["results"].size(), 1u);
}

TEST_F(Cli, CalibrateFivePercent) {
    const auto config = bernoulli();
    const auto targets = write("targets.json", R"({"schema": 1, "kind": "problem1", "alpha": [[0, 0.05], [0.05, 0]]})");
    ASSERT_EQ(run({"calibrate", "--config", config, "--targets", targets, "--out", path("o")}), 0) << out_.str();
    const auto result = json::parse(read("o/calibration.json"));
    for (const auto& c : result["constraints"]) EXPECT_LE(c["achieved"].get<double>(), 0.05);
    EXPECT_EQ(result["status"], "converged");
    EXPECT_EQ(json::parse(read("o/design.json"))["artifact"], "design");
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run({"design", "--config", write("bad.json", R"({"alphabet": 2})"), "--out", path("o")}), 2);
    EXPECT_EQ(run({"design", "--config", write("broken.json", "{"), "--out", path("o")}), 2);
    EXPECT_EQ(run({"design", "--config", path("missing.json")}), 2);
    EXPECT_EQ(run({"bogus"}), 2);
    const auto capped = bernoulli(R"(, "design": {"mode": "truncated", "N": 30, "state_cap": 10})");
    EXPECT_EQ(run({"design", "--config", capped, "--out", path("o")}), 3);
    const auto identical = write("identical.json", R"({"alphabet": 2, "hypotheses": [[0.4, 0.6], [0.4, 0.6]],
        "asn": {"mixture": [{"pmf": [0.5, 0.5]}]}, "lambda": 10})");
    EXPECT_EQ(run({"design", "--config", identical, "--out", path("o")}), 4);
    const auto short_cap = bernoulli(R"(, "design": {"N_max": 8})", "100000");
    EXPECT_EQ(run({"design", "--config", short_cap, "--out", path("o")}), 4);
    EXPECT_TRUE(fs::exists(path("o/design.json")));
}

TEST_F(Cli, ThreadEnvironmentVariable) {
    const auto config = bernoulli();
    ::setenv("SEQOPT_THREADS", "2", 1);
    EXPECT_EQ(run({"design", "--config", config, "--out", path("a")}), 0);
    ::setenv("SEQOPT_THREADS", "many", 1);
    EXPECT_EQ(run({"design", "--config", config, "--out", path("b")}), 2);
    ::unsetenv("SEQOPT_THREADS");
    EXPECT_EQ(run({"design", "--config", config, "--out", path("c"), "--threads", "1"}), 0);
    EXPECT_EQ(read("a/design.json"), read("c/design.json"));
}
