#include "cli.hpp"

#include "seqopt/calibrate.hpp"
#include "seqopt/errors.hpp"
#include "seqopt/evaluate.hpp"
#include "seqopt/io.hpp"
#include "seqopt/parallel.hpp"
#include "seqopt/simulate.hpp"
#include "seqopt/solver.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace seqopt::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

struct Inputs {
    std::string config;
    std::string out = ".";
    std::string design;
    std::string targets;
    std::string mode;
    int N = 0;
    bool csv = false;
    bool randomize_ties = false;
    std::size_t reps = 100'000;
    std::uint64_t seed = 1;
    std::string truth = "all";
};

std::string file_sha256(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return io::sha256_hex(buffer.str());
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char text[32];
    std::strftime(text, sizeof text, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return text;
}

/// Records what a run consumed and produced. The hash covers everything that
/// determines the artifacts (inputs by content, parameters, seeds, version)
/// and nothing that varies between identical runs (paths, wall clock).
class Manifest {
public:
    Manifest(std::string command, std::string out_dir)
        : command_(std::move(command)), out_dir_(std::move(out_dir)), started_(utc_now()),
          clock_start_(std::chrono::steady_clock::now()) {}

    void input(const std::string& role, const std::string& path) {
        inputs_.push_back({{"role", role}, {"sha256", file_sha256(path)}});
        paths_[role] = path;
    }
    void parameter(const std::string& key, json value) { parameters_[key] = std::move(value); }
    void seed(std::uint64_t s) { seeds_.push_back(s); }

    std::string hash() const {
        const json hashed = {{"command", command_},
                             {"tool_version", io::kToolVersion},
                             {"inputs", inputs_},
                             {"parameters", parameters_},
                             {"seeds", seeds_}};
        return io::sha256_hex(hashed.dump());
    }

    /// Writes an artifact with the manifest hash embedded.
    void write_json(const std::string& name, json document) {
        document["manifest_hash"] = hash();
        write_text(name, io::dump(document));
    }
    void write_text(const std::string& name, const std::string& text) {
        const auto path = (fs::path(out_dir_) / name).string();
        io::write_text_file(path, text);
        outputs_.push_back(path);
    }

    void finish() {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start_).count();
        const json manifest = {{"schema", io::kSchema},
                               {"artifact", "manifest"},
                               {"command", command_},
                               {"tool_version", io::kToolVersion},
                               {"inputs", inputs_},
                               {"input_paths", paths_},
                               {"parameters", parameters_},
                               {"seeds", seeds_},
                               {"outputs", outputs_},
                               {"manifest_hash", hash()},
                               {"wall_clock", {{"started_utc", started_}, {"elapsed_seconds", elapsed}}}};
        io::write_text_file((fs::path(out_dir_) / (command_ + "_manifest.json")).string(), io::dump(manifest));
    }

private:
    std::string command_;
    std::string out_dir_;
    std::string started_;
    std::chrono::steady_clock::time_point clock_start_;
    json inputs_ = json::array();
    json paths_ = json::object();
    json parameters_ = json::object();
    json seeds_ = json::array();
    json outputs_ = json::array();
};

json settings_to_json(const io::DesignSettings& s) {
    return {{"mode", s.mode == io::DesignMode::truncated ? "truncated" : "limit"},
            {"N", s.N},
            {"N_start", s.solver.N_start},
            {"N_step", s.solver.N_step},
            {"N_max", s.solver.N_max},
            {"tolerance", s.solver.tolerance},
            {"override_truncatability", s.solver.override_truncatability},
            {"diagnostic_horizon", s.solver.diagnostic_horizon},
            {"state_cap", s.solver.limits.state_cap}};
}

io::DesignSettings resolve_settings(const json& config, const Inputs& in) {
    auto settings = io::parse_design_settings(config);
    if (!in.mode.empty()) {
        if (in.mode == "truncated") {
            settings.mode = io::DesignMode::truncated;
        } else if (in.mode == "limit") {
            settings.mode = io::DesignMode::limit;
        } else {
            throw ValidationError("--mode must be 'truncated' or 'limit'");
        }
    }
    if (in.N != 0) settings.N = in.N;
    if (settings.mode == io::DesignMode::truncated && settings.N < 1) {
        throw ValidationError("truncated mode needs N >= 1 (design.N or --N)");
    }
    return settings;
}

/// A solved design together with the lattice its plan indexes.
struct Solved {
    ValueTables values;
    TestPlan plan;
    std::vector<TraceEntry> trace;
    bool converged = true;
    std::optional<StateLattice> lattice;
};

Solved solve(const ProcessModel& model, const LagrangeWeights& weights, const io::DesignSettings& settings) {
    Solved out;
    if (settings.mode == io::DesignMode::truncated) {
        out.lattice.emplace(model, settings.N, settings.solver.limits);
        auto design = solve_truncated(*out.lattice, weights, settings.N);
        out.values = std::move(design.values);
        out.plan = std::move(design.plan);
        out.trace.push_back({settings.N, out.values.value, true});
        return out;
    }
    auto design = solve_limit(model, weights, settings.solver);
    out.lattice.emplace(model, design.effective_horizon, settings.solver.limits);
    out.values = std::move(design.values);
    out.plan = std::move(design.plan);
    out.trace = std::move(design.trace);
    out.converged = design.converged;
    return out;
}

json design_document(const Solved& s, const LagrangeWeights& weights, const TrivialityReport& triviality,
                     const HypothesisSet& hypotheses, const io::DesignSettings& settings) {
    auto doc = io::design_to_json(s.values, s.plan, *s.lattice, weights, triviality, s.trace, s.converged, hypotheses);
    doc["mode"] = settings.mode == io::DesignMode::truncated ? "truncated" : "limit";
    return doc;
}

void prepare_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ValidationError("cannot create output directory " + dir);
}

EvaluationOptions tie_options(bool randomize) { return {randomize, randomize}; }

int cmd_design(const Inputs& in, std::ostream& out) {
    const json config = io::read_json_file(in.config);
    const auto model = io::parse_model(config);
    const auto weights = io::parse_weights(config, num_hypotheses(model));
    const auto settings = resolve_settings(config, in);
    prepare_out_dir(in.out);

    Manifest manifest("design", in.out);
    manifest.input("config", in.config);
    manifest.parameter("design", settings_to_json(settings));
    manifest.parameter("weights", io::weights_to_json(weights));

    const auto solved = solve(model, weights, settings);
    const auto triviality = triviality_check(weights, solved.values.value);
    const auto& hypotheses = hypotheses_of(model);
    manifest.write_json("design.json", design_document(solved, weights, triviality, hypotheses, settings));
    manifest.write_text("design_summary.txt",
                        io::design_summary(solved.values, solved.plan, *solved.lattice, triviality, hypotheses));
    manifest.finish();

    out << "design: value " << solved.values.value << ", horizon " << solved.values.N
        << (triviality.take_observations ? "" : ", trivial") << (solved.converged ? "" : ", NOT converged") << "\n";
    return solved.converged ? ok : non_convergence;
}

std::string csv_number(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

int cmd_evaluate(const Inputs& in, std::ostream& out) {
    const json config = io::read_json_file(in.config);
    const json design = io::read_json_file(in.design);
    if (design.value("artifact", std::string()) != "design" || !design.contains("plan")) {
        throw ValidationError(in.design + " is not a design artifact");
    }
    const auto model = io::parse_model(config);
    const int k = num_hypotheses(model);
    const auto weights = design.contains("weights") ? io::weights_from_json(design["weights"]) : io::parse_weights(config, k);
    if (weights.size() != k) throw ValidationError("design weights do not match the model");
    const auto settings = io::parse_design_settings(config);
    prepare_out_dir(in.out);

    Manifest manifest("evaluate", in.out);
    manifest.input("config", in.config);
    manifest.input("design", in.design);
    manifest.parameter("randomize_ties", in.randomize_ties);
    manifest.parameter("csv", in.csv);

    const auto& plan_doc = design["plan"];
    if (!plan_doc.contains("horizon") || !plan_doc["horizon"].is_number_integer()) {
        throw ValidationError("plan needs an integer horizon");
    }
    const StateLattice lattice(model, plan_doc["horizon"].get<int>(), settings.solver.limits);
    const auto plan = io::plan_from_json(plan_doc, lattice);
    const auto oc = exact_oc(lattice, plan, weights, tie_options(in.randomize_ties));

    json report = io::oc_to_json(oc, hypotheses_of(model));
    report["schema"] = io::kSchema;
    report["artifact"] = "oc";
    report["randomize_ties"] = in.randomize_ties;
    report["weights"] = io::weights_to_json(weights);
    if (design.contains("value") && design["value"].is_number()) {
        const double value = design["value"].get<double>();
        report["design_value"] = value;
        report["lagrangian_minus_value"] = oc.lagrangian - value;
    }
    manifest.write_json("oc.json", report);

    if (in.csv) {
        std::ostringstream tables;
        tables << "m,states,stop_states,continue_states,boundary_ties,R_total,V_total\n";
        for (const auto& row : design.value("stages", json::array())) {
            auto field = [&](const char* key) {
                if (!row.contains(key)) return std::string();
                return row[key].is_number_float() ? csv_number(row[key].get<double>()) : row[key].dump();
            };
            tables << field("m") << ',' << field("states") << ',' << field("stop_states") << ','
                   << field("continue_states") << ',' << field("boundary_ties") << ',' << field("R_total") << ','
                   << field("V_total") << "\n";
        }
        manifest.write_text("tables.csv", tables.str());
        std::ostringstream trace;
        trace << "N,value,regions_stable\n";
        for (const auto& row : design.value("trace", json::array())) {
            trace << row.value("N", 0) << ',' << csv_number(row.value("value", 0.0)) << ','
                  << (row.value("regions_stable", false) ? "true" : "false") << "\n";
        }
        manifest.write_text("trace.csv", trace.str());
    }
    manifest.finish();
    out << "evaluate: lagrangian " << oc.lagrangian << ", mixture ASN " << oc.mixture_asn() << "\n";
    return ok;
}

std::vector<TrueParameter> parse_truth(const std::string& text, int k) {
    std::vector<TrueParameter> out;
    if (text == "all") {
        for (int i = 0; i < k; ++i) out.push_back(TrueParameter::hypothesis(i));
        out.push_back(TrueParameter::mixture());
        return out;
    }
    if (text == "mixture") return {TrueParameter::mixture()};
    try {
        std::size_t used = 0;
        const int i = std::stoi(text, &used);
        if (used == text.size() && i >= 1 && i <= k) return {TrueParameter::hypothesis(i - 1)};
    } catch (const std::exception&) {
    }
    throw ValidationError("--true must be a hypothesis index 1.." + std::to_string(k) + ", 'mixture' or 'all'");
}

int cmd_simulate(const Inputs& in, std::ostream& out) {
    const json config = io::read_json_file(in.config);
    const auto model = io::parse_model(config);
    const int k = num_hypotheses(model);
    const auto truths = parse_truth(in.truth, k);
    if (in.reps < 1) throw ValidationError("--reps must be at least 1");
    prepare_out_dir(in.out);

    Manifest manifest("simulate", in.out);
    manifest.input("config", in.config);
    manifest.parameter("replications", in.reps);
    manifest.parameter("true", in.truth);
    manifest.parameter("randomize_ties", in.randomize_ties);
    manifest.seed(in.seed);

    std::optional<StateLattice> lattice;
    TestPlan plan;
    std::optional<LagrangeWeights> weights;
    bool converged = true;
    const auto settings = io::parse_design_settings(config);
    if (!in.design.empty()) {
        manifest.input("design", in.design);
        const json design = io::read_json_file(in.design);
        if (design.value("artifact", std::string()) != "design" || !design.contains("plan")) {
            throw ValidationError(in.design + " is not a design artifact");
        }
        if (design.contains("weights")) weights = io::weights_from_json(design["weights"]);
        const auto& plan_doc = design["plan"];
        if (!plan_doc.contains("horizon") || !plan_doc["horizon"].is_number_integer()) {
            throw ValidationError("plan needs an integer horizon");
        }
        lattice.emplace(model, plan_doc["horizon"].get<int>(), settings.solver.limits);
        plan = io::plan_from_json(plan_doc, *lattice);
    } else {
        const auto resolved = resolve_settings(config, in);
        manifest.parameter("design", settings_to_json(resolved));
        weights = io::parse_weights(config, k);
        auto solved = solve(model, *weights, resolved);
        converged = solved.converged;
        plan = std::move(solved.plan);
        lattice = std::move(solved.lattice);
    }
    if (!weights) weights = io::parse_weights(config, k);
    manifest.parameter("weights", io::weights_to_json(*weights));

    const auto ties = tie_options(in.randomize_ties);
    const auto exact = exact_oc(*lattice, plan, *weights, ties);
    json results = json::array();
    bool all_agree = true;
    for (const auto& truth : truths) {
        SimulationOptions options;
        options.replications = in.reps;
        options.seed = in.seed;
        options.ties = ties;
        const auto estimate = run_monte_carlo(*lattice, plan, truth, options);
        const auto check = compare_with_exact(estimate, exact);
        all_agree = all_agree && check.agrees;
        results.push_back(io::estimate_to_json(estimate, check));
    }
    const json report = {{"schema", io::kSchema},
                         {"artifact", "simulation"},
                         {"replications", in.reps},
                         {"seed", in.seed},
                         {"randomize_ties", in.randomize_ties},
                         {"generator", "philox4x64-10"},
                         {"labels", hypotheses_of(model).labels()},
                         {"results", std::move(results)},
                         {"all_agree", all_agree}};
    manifest.write_json("simulation.json", report);
    manifest.finish();
    out << "simulate: " << truths.size() << " parameter(s), " << in.reps << " replications, agreement "
        << (all_agree ? "yes" : "no") << "\n";
    return converged ? ok : non_convergence;
}

int cmd_calibrate(const Inputs& in, std::ostream& out) {
    const json config = io::read_json_file(in.config);
    const auto model = io::parse_model(config);
    json targets_doc;
    if (!in.targets.empty()) {
        targets_doc = io::read_json_file(in.targets);
    } else if (config.contains("targets")) {
        targets_doc = config["targets"];
    } else {
        throw ValidationError("calibrate needs --targets or a 'targets' block in the config");
    }
    const auto target = io::parse_targets(targets_doc);
    auto settings = io::parse_design_settings(config);
    settings.mode = io::DesignMode::limit;
    auto calibration = io::parse_calibration_config(config, settings);
    if (in.randomize_ties) calibration.evaluation = tie_options(true);
    prepare_out_dir(in.out);

    Manifest manifest("calibrate", in.out);
    manifest.input("config", in.config);
    if (!in.targets.empty()) manifest.input("targets", in.targets);
    manifest.parameter("design", settings_to_json(settings));
    manifest.parameter("targets", targets_doc);
    manifest.parameter("calibration",
                       {{"initial", calibration.initial},
                        {"bracket", {calibration.bracket_lo, calibration.bracket_hi}},
                        {"log_resolution", calibration.log_resolution},
                        {"max_sweeps", calibration.max_sweeps},
                        {"randomize_ties", calibration.evaluation.randomize_stopping_ties}});

    const auto result = fit_multipliers(model, target, calibration);
    manifest.write_json("calibration.json", io::calibration_to_json(result, target));
    const StateLattice lattice(model, result.design.effective_horizon, settings.solver.limits);
    auto design = io::design_to_json(result.design.values, result.design.plan, lattice, result.weights,
                                     result.triviality, result.design.trace, result.design.converged,
                                     hypotheses_of(model));
    design["mode"] = "limit";
    manifest.write_json("design.json", design);
    manifest.finish();

    out << "calibrate: " << to_string(result.status) << ", feasible " << (result.feasible ? "yes" : "no")
        << ", mixture ASN " << result.achieved_oc.mixture_asn() << "\n";
    if (!result.message.empty()) out << "  " << result.message << "\n";
    return result.status == CalibrationStatus::converged && result.feasible ? ok : non_convergence;
}

void apply_threads(int flag) {
    int threads = flag;
    if (threads == 0) {
        if (const char* env = std::getenv("SEQOPT_THREADS"); env && *env) {
            try {
                threads = std::stoi(env);
            } catch (const std::exception&) {
                throw ValidationError("SEQOPT_THREADS must be an integer");
            }
        }
    }
    if (threads < 0) throw ValidationError("thread count must be nonnegative");
    set_thread_count(threads);
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exactly optimal sequential tests for k simple hypotheses", "seqopt"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    app.add_option("--threads", threads, "Worker thread cap (default: SEQOPT_THREADS or all cores)");

    Inputs in;
    auto common = [&in](CLI::App* sub) {
        sub->add_option("--config", in.config, "Model configuration JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", in.out, "Output directory");
    };
    auto* design = app.add_subcommand("design", "Solve for the optimal test");
    common(design);
    design->add_option("--mode", in.mode, "truncated or limit (overrides the config)");
    design->add_option("--N", in.N, "Truncation horizon for truncated mode");

    auto* evaluate = app.add_subcommand("evaluate", "Exact operating characteristics of a design");
    common(evaluate);
    evaluate->add_option("--design", in.design, "Design artifact")->required()->check(CLI::ExistingFile);
    evaluate->add_flag("--csv", in.csv, "Also write tables.csv and trace.csv");
    evaluate->add_flag("--randomize-ties", in.randomize_ties, "Randomize at boundary and decision ties");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of a design");
    common(simulate);
    simulate->add_option("--design", in.design, "Design artifact (solved from the config if omitted)")
        ->check(CLI::ExistingFile);
    simulate->add_option("--reps", in.reps, "Replications per true parameter");
    simulate->add_option("--seed", in.seed, "Generator seed");
    simulate->add_option("--true", in.truth, "Hypothesis index (1-based), 'mixture' or 'all'");
    simulate->add_flag("--randomize-ties", in.randomize_ties, "Randomize at boundary and decision ties");
    simulate->add_option("--mode", in.mode, "truncated or limit when solving from the config");
    simulate->add_option("--N", in.N, "Truncation horizon when solving from the config");

    auto* calibrate = app.add_subcommand("calibrate", "Fit multipliers to error targets");
    common(calibrate);
    calibrate->add_option("--targets", in.targets, "Targets JSON (else the config's 'targets' block)")
        ->check(CLI::ExistingFile);
    calibrate->add_flag("--randomize-ties", in.randomize_ties, "Evaluate with randomized ties");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : validation_error;
    }

    try {
        apply_threads(threads);
        if (design->parsed()) return cmd_design(in, out);
        if (evaluate->parsed()) return cmd_evaluate(in, out);
        if (simulate->parsed()) return cmd_simulate(in, out);
        return cmd_calibrate(in, out);
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return validation_error;
    } catch (const NumericalGuardError& e) {
        err << "numerical guard: " << e.what() << "\n";
        return numerical_guard;
    } catch (const ConvergenceError& e) {
        err << "non-convergence: " << e.what() << "\n";
        return non_convergence;
    } catch (const json::exception& e) {
        err << "validation error: " << e.what() << "\n";
        return validation_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return internal_error;
    }
}

} // namespace seqopt::cli
