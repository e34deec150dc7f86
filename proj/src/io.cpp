#include "seqopt/io.hpp"

#include "seqopt/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace seqopt::io {

namespace {

void check_keys(const json& object, const std::set<std::string>& allowed, const std::string& context) {
    if (!object.is_object()) throw ValidationError(context + " must be a JSON object");
    for (const auto& [key, value] : object.items()) {
        if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + context);
    }
}

double number(const json& value, const std::string& what) {
    if (!value.is_number()) throw ValidationError(what + " must be a number");
    return value.get<double>();
}

int integer(const json& value, const std::string& what) {
    if (!value.is_number_integer()) throw ValidationError(what + " must be an integer");
    return value.get<int>();
}

bool boolean(const json& value, const std::string& what) {
    if (!value.is_boolean()) throw ValidationError(what + " must be true or false");
    return value.get<bool>();
}

std::vector<double> number_array(const json& value, const std::string& what) {
    if (!value.is_array()) throw ValidationError(what + " must be an array");
    std::vector<double> out;
    for (const auto& v : value) out.push_back(number(v, what + " entry"));
    return out;
}

std::vector<std::vector<double>> number_matrix(const json& value, const std::string& what) {
    if (!value.is_array()) throw ValidationError(what + " must be an array of arrays");
    std::vector<std::vector<double>> out;
    for (const auto& row : value) out.push_back(number_array(row, what + " row"));
    return out;
}

void check_schema(const json& document, const std::string& context) {
    if (document.contains("schema") && document["schema"] != kSchema) {
        throw ValidationError(context + ": unsupported schema version " + document["schema"].dump());
    }
}

int hypothesis_index(const json& value, int k, const std::string& what) {
    const int i = integer(value, what);
    if (i < 1 || i > k) throw ValidationError(what + " must be between 1 and " + std::to_string(k));
    return i - 1;
}

JointTables parse_joint_tables(const json& document, int A, const std::string& what) {
    if (!document.is_object() || document.empty()) throw ValidationError(what + " must be a non-empty object");
    int horizon = 0;
    std::vector<std::pair<History, double>> entries;
    for (const auto& [key, value] : document.items()) {
        History h;
        try {
            h = decode_history(key, A);
        } catch (const std::exception& e) {
            throw ValidationError(what + ": bad history '" + key + "': " + e.what());
        }
        if (h.empty()) throw ValidationError(what + ": empty history key");
        horizon = std::max(horizon, static_cast<int>(h.size()));
        entries.emplace_back(std::move(h), number(value, what + " mass"));
    }
    JointTables tables;
    std::size_t size = 1;
    for (int n = 1; n <= horizon; ++n) {
        size *= static_cast<std::size_t>(A);
        tables.by_length.emplace_back(size, 0.0);
    }
    for (const auto& [h, mass] : entries) {
        std::size_t index = 0;
        for (int a : h) index = index * static_cast<std::size_t>(A) + static_cast<std::size_t>(a);
        tables.by_length[h.size() - 1][index] = mass;
    }
    return tables;
}

const char* action_name(Action a) {
    switch (a) {
    case Action::stop: return "stop";
    case Action::continue_sampling: return "continue";
    case Action::boundary_tie: return "boundary_tie";
    }
    return "stop";
}

Action action_from_name(const std::string& name) {
    if (name == "stop") return Action::stop;
    if (name == "continue") return Action::continue_sampling;
    if (name == "boundary_tie") return Action::boundary_tie;
    throw ValidationError("unknown plan action '" + name + "'");
}

json state_to_json(const StateLattice& lattice, int m, std::size_t s) {
    const auto label = lattice.label(m, s);
    if (lattice.kind() == StateKind::counts) return label;
    return encode_history(label, lattice.alphabet_size());
}

StateLabel state_from_json(const json& value, const StateLattice& lattice) {
    if (lattice.kind() == StateKind::counts) {
        if (!value.is_array()) throw ValidationError("count states must be arrays of counts");
        StateLabel out;
        for (const auto& c : value) out.push_back(integer(c, "state count"));
        return out;
    }
    if (!value.is_string()) throw ValidationError("history states must be strings");
    return decode_history(value.get<std::string>(), lattice.alphabet_size());
}

std::string format_number(double x) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.12g", x);
    return buffer;
}

std::vector<int> one_based(const std::vector<int>& indices) {
    std::vector<int> out;
    for (int i : indices) out.push_back(i + 1);
    return out;
}

} // namespace

ProcessModel parse_model(const json& config) {
    check_schema(config, "config");
    if (!config.contains("alphabet")) throw ValidationError("config needs 'alphabet'");
    const int A = integer(config["alphabet"], "alphabet");
    const Alphabet alphabet(A);
    const bool iid = config.contains("hypotheses");
    const bool joint = config.contains("joint_tables");
    if (iid == joint) throw ValidationError("config needs exactly one of 'hypotheses' or 'joint_tables'");

    int k = 0;
    std::vector<Pmf> pmfs;
    std::vector<JointTables> tables;
    if (iid) {
        pmfs = number_matrix(config["hypotheses"], "hypotheses");
        k = static_cast<int>(pmfs.size());
    } else {
        const auto& section = config["joint_tables"];
        if (!section.is_object()) throw ValidationError("joint_tables must be an object keyed by hypothesis");
        k = static_cast<int>(section.size());
        for (int i = 1; i <= k; ++i) {
            const auto key = std::to_string(i);
            if (!section.contains(key)) throw ValidationError("joint_tables must be keyed 1.." + std::to_string(k));
            tables.push_back(parse_joint_tables(section[key], A, "joint_tables[" + key + "]"));
        }
    }

    HypothesisSet hypotheses = HypothesisSet::numbered(std::max(k, 2));
    if (config.contains("labels")) {
        if (!config["labels"].is_array()) throw ValidationError("labels must be an array of strings");
        std::vector<std::string> labels;
        for (const auto& l : config["labels"]) {
            if (!l.is_string()) throw ValidationError("labels must be strings");
            labels.push_back(l.get<std::string>());
        }
        if (static_cast<int>(labels.size()) != k) throw ValidationError("one label per hypothesis is required");
        hypotheses = HypothesisSet(labels);
    } else if (k < 2) {
        throw ValidationError("at least two hypotheses are required");
    }

    if (!config.contains("asn")) throw ValidationError("config needs 'asn'");
    const auto& asn = config["asn"];
    check_keys(asn, {"mixture"}, "asn");
    if (!asn.contains("mixture") || !asn["mixture"].is_array() || asn["mixture"].empty()) {
        throw ValidationError("asn.mixture must be a non-empty array");
    }

    if (iid) {
        std::vector<AsnComponent> components;
        for (const auto& c : asn["mixture"]) {
            check_keys(c, {"pmf", "hypothesis", "weight"}, "asn.mixture entry");
            AsnComponent component;
            component.weight = c.contains("weight") ? number(c["weight"], "mixture weight") : 1.0;
            if (c.contains("pmf") == c.contains("hypothesis")) {
                throw ValidationError("each asn.mixture entry needs exactly one of 'pmf' or 'hypothesis'");
            }
            component.pmf = c.contains("pmf") ? number_array(c["pmf"], "mixture pmf")
                                             : pmfs[static_cast<std::size_t>(hypothesis_index(c["hypothesis"], k, "mixture hypothesis"))];
            components.push_back(std::move(component));
        }
        return IidModel(alphabet, hypotheses, pmfs, components);
    }

    std::vector<AsnJointComponent> components;
    for (const auto& c : asn["mixture"]) {
        check_keys(c, {"joint_table", "hypothesis", "weight"}, "asn.mixture entry");
        AsnJointComponent component;
        component.weight = c.contains("weight") ? number(c["weight"], "mixture weight") : 1.0;
        if (c.contains("joint_table") == c.contains("hypothesis")) {
            throw ValidationError("each asn.mixture entry needs exactly one of 'joint_table' or 'hypothesis'");
        }
        component.tables = c.contains("joint_table")
                               ? parse_joint_tables(c["joint_table"], A, "mixture joint_table")
                               : tables[static_cast<std::size_t>(hypothesis_index(c["hypothesis"], k, "mixture hypothesis"))];
        components.push_back(std::move(component));
    }
    return JointTableModel(alphabet, hypotheses, tables, components);
}

bool has_weights(const json& config) { return config.contains("lambda") || config.contains("lambda_rows"); }

LagrangeWeights parse_weights(const json& config, int k) {
    if (config.contains("lambda") && config.contains("lambda_rows")) {
        throw ValidationError("give either 'lambda' or 'lambda_rows', not both");
    }
    if (config.contains("lambda_rows")) {
        const auto rows = number_array(config["lambda_rows"], "lambda_rows");
        if (static_cast<int>(rows.size()) != k) throw ValidationError("lambda_rows needs one entry per hypothesis");
        return LagrangeWeights::row_constant(rows);
    }
    if (!config.contains("lambda")) throw ValidationError("config needs 'lambda' or 'lambda_rows'");
    if (config["lambda"].is_number()) return LagrangeWeights::uniform(k, config["lambda"].get<double>());
    const auto matrix = number_matrix(config["lambda"], "lambda");
    if (static_cast<int>(matrix.size()) != k) throw ValidationError("lambda must be k x k");
    for (const auto& row : matrix) {
        if (static_cast<int>(row.size()) != k) throw ValidationError("lambda must be k x k");
    }
    return LagrangeWeights::general(matrix);
}

DesignSettings parse_design_settings(const json& config) {
    DesignSettings settings;
    if (!config.contains("design")) return settings;
    const auto& d = config["design"];
    check_keys(d, {"mode", "N", "N_start", "N_step", "N_max", "tolerance", "override_truncatability",
                   "diagnostic_horizon", "state_cap"},
               "design");
    if (d.contains("mode")) {
        const auto mode = d["mode"].is_string() ? d["mode"].get<std::string>() : std::string();
        if (mode == "truncated") {
            settings.mode = DesignMode::truncated;
        } else if (mode == "limit") {
            settings.mode = DesignMode::limit;
        } else {
            throw ValidationError("design.mode must be 'truncated' or 'limit'");
        }
    }
    auto& s = settings.solver;
    if (d.contains("N")) settings.N = integer(d["N"], "design.N");
    if (d.contains("N_start")) s.N_start = integer(d["N_start"], "design.N_start");
    if (d.contains("N_step")) s.N_step = integer(d["N_step"], "design.N_step");
    if (d.contains("N_max")) s.N_max = integer(d["N_max"], "design.N_max");
    if (d.contains("tolerance")) s.tolerance = number(d["tolerance"], "design.tolerance");
    if (d.contains("override_truncatability")) {
        s.override_truncatability = boolean(d["override_truncatability"], "design.override_truncatability");
    }
    if (d.contains("diagnostic_horizon")) s.diagnostic_horizon = integer(d["diagnostic_horizon"], "design.diagnostic_horizon");
    if (d.contains("state_cap")) {
        const double cap = number(d["state_cap"], "design.state_cap");
        if (!(cap >= 1.0)) throw ValidationError("design.state_cap must be positive");
        s.limits.state_cap = static_cast<std::size_t>(cap);
    }
    return settings;
}

CalibrationTarget parse_targets(const json& targets) {
    check_schema(targets, "targets");
    check_keys(targets, {"schema", "kind", "alpha", "beta", "slack"}, "targets");
    CalibrationTarget t;
    const auto kind = targets.contains("kind") && targets["kind"].is_string() ? targets["kind"].get<std::string>() : "";
    if (kind == "problem1") {
        t.kind = ProblemKind::general;
        if (!targets.contains("alpha")) throw ValidationError("problem1 targets need 'alpha'");
        t.alpha = number_matrix(targets["alpha"], "alpha targets");
    } else if (kind == "problem2") {
        t.kind = ProblemKind::row_constant;
        if (!targets.contains("beta")) throw ValidationError("problem2 targets need 'beta'");
        t.beta = number_array(targets["beta"], "beta targets");
    } else {
        throw ValidationError("targets.kind must be 'problem1' or 'problem2'");
    }
    if (targets.contains("slack")) t.slack = number(targets["slack"], "slack");
    return t;
}

CalibrationConfig parse_calibration_config(const json& config, const DesignSettings& design) {
    CalibrationConfig c;
    c.solver = design.solver;
    if (!config.contains("calibration")) return c;
    const auto& s = config["calibration"];
    check_keys(s, {"initial", "bracket", "log_resolution", "max_sweeps", "randomize_ties"}, "calibration");
    if (s.contains("initial")) c.initial = number(s["initial"], "calibration.initial");
    if (s.contains("bracket")) {
        const auto b = number_array(s["bracket"], "calibration.bracket");
        if (b.size() != 2) throw ValidationError("calibration.bracket must be [lo, hi]");
        c.bracket_lo = b[0];
        c.bracket_hi = b[1];
    }
    if (s.contains("log_resolution")) c.log_resolution = number(s["log_resolution"], "calibration.log_resolution");
    if (s.contains("max_sweeps")) c.max_sweeps = integer(s["max_sweeps"], "calibration.max_sweeps");
    if (s.contains("randomize_ties")) {
        const bool r = boolean(s["randomize_ties"], "calibration.randomize_ties");
        c.evaluation.randomize_stopping_ties = r;
        c.evaluation.randomize_decision_ties = r;
    }
    return c;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

std::string dump(const json& document) { return document.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("failed writing " + path);
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

json weights_to_json(const LagrangeWeights& weights) {
    if (weights.kind() == ProblemKind::row_constant) {
        std::vector<double> rows;
        for (int i = 0; i < weights.size(); ++i) rows.push_back(weights.row(i));
        return {{"kind", "row_constant"}, {"lambda_rows", rows}};
    }
    return {{"kind", "general"}, {"lambda", weights.matrix()}};
}

LagrangeWeights weights_from_json(const json& document) {
    check_keys(document, {"kind", "lambda", "lambda_rows"}, "weights");
    if (document.contains("lambda_rows")) return LagrangeWeights::row_constant(number_array(document["lambda_rows"], "lambda_rows"));
    if (!document.contains("lambda")) throw ValidationError("weights need 'lambda' or 'lambda_rows'");
    const auto m = number_matrix(document["lambda"], "lambda");
    return LagrangeWeights::general(m);
}

json decision_to_json(const DecisionLabel& label) {
    return {{"accept", label.accept + 1}, {"ties", one_based(label.tie_set())}};
}

json plan_to_json(const TestPlan& plan, const StateLattice& lattice) {
    json stages = json::array();
    for (int m = 1; m <= plan.horizon; ++m) {
        const auto& step = plan.stages[static_cast<std::size_t>(m)];
        json states = json::array();
        for (std::size_t s = 0; s < step.actions.size(); ++s) {
            json entry = {{"state", state_to_json(lattice, m, s)}, {"action", action_name(step.actions[s])}};
            if (stops(step.actions[s])) {
                entry["accept"] = step.decisions[s].accept + 1;
                entry["ties"] = one_based(step.decisions[s].tie_set());
            }
            states.push_back(std::move(entry));
        }
        stages.push_back({{"m", m}, {"states", std::move(states)}});
    }
    return {{"kind", plan.kind == PlanKind::limit ? "limit" : "truncated"},
            {"horizon", plan.horizon},
            {"state_kind", plan.state_kind == StateKind::counts ? "counts" : "histories"},
            {"alphabet", plan.alphabet_size},
            {"hypotheses", plan.num_hypotheses},
            {"stages", std::move(stages)}};
}

TestPlan plan_from_json(const json& document, const StateLattice& lattice) {
    check_keys(document, {"kind", "horizon", "state_kind", "alphabet", "hypotheses", "stages"}, "plan");
    for (const char* key : {"horizon", "stages"}) {
        if (!document.contains(key)) throw ValidationError(std::string("plan needs '") + key + "'");
    }
    TestPlan plan;
    plan.kind = document.value("kind", std::string("truncated")) == "limit" ? PlanKind::limit : PlanKind::truncated;
    plan.horizon = integer(document["horizon"], "plan.horizon");
    plan.state_kind = lattice.kind();
    plan.alphabet_size = lattice.alphabet_size();
    plan.num_hypotheses = lattice.num_hypotheses();
    if (document.contains("state_kind")) {
        const bool counts = document["state_kind"] == "counts";
        if (counts != (lattice.kind() == StateKind::counts)) throw ValidationError("plan state kind does not match the model");
    }
    if (document.contains("alphabet") && integer(document["alphabet"], "plan.alphabet") != plan.alphabet_size) {
        throw ValidationError("plan alphabet does not match the model");
    }
    if (document.contains("hypotheses") && integer(document["hypotheses"], "plan.hypotheses") != plan.num_hypotheses) {
        throw ValidationError("plan hypothesis count does not match the model");
    }
    if (plan.horizon < 1 || plan.horizon > lattice.horizon()) throw ValidationError("plan horizon outside the model");
    const auto& stages = document["stages"];
    if (!stages.is_array() || static_cast<int>(stages.size()) != plan.horizon) {
        throw ValidationError("plan must list stages 1..horizon");
    }
    plan.stages.resize(static_cast<std::size_t>(plan.horizon) + 1);
    const int k = plan.num_hypotheses;
    for (int m = 1; m <= plan.horizon; ++m) {
        const auto& stage = stages[static_cast<std::size_t>(m - 1)];
        check_keys(stage, {"m", "states"}, "plan stage");
        if (!stage.contains("m") || integer(stage["m"], "plan stage m") != m) {
            throw ValidationError("plan stages must be listed in order 1..horizon");
        }
        const auto size = lattice.stage(m).size;
        auto& step = plan.stages[static_cast<std::size_t>(m)];
        step.actions.assign(size, Action::stop);
        step.decisions.assign(size, DecisionLabel::single(0));
        std::vector<bool> seen(size, false);
        if (!stage.contains("states") || !stage["states"].is_array()) throw ValidationError("plan stage needs 'states'");
        for (const auto& entry : stage["states"]) {
            check_keys(entry, {"state", "action", "accept", "ties"}, "plan state");
            if (!entry.contains("state") || !entry.contains("action")) {
                throw ValidationError("plan states need 'state' and 'action'");
            }
            const auto label = state_from_json(entry["state"], lattice);
            const auto s = lattice.find(m, label);
            if (!s) throw ValidationError("plan references a state absent from the model at stage " + std::to_string(m));
            if (seen[*s]) throw ValidationError("plan lists a state twice at stage " + std::to_string(m));
            seen[*s] = true;
            if (!entry["action"].is_string()) throw ValidationError("plan action must be a string");
            step.actions[*s] = action_from_name(entry["action"].get<std::string>());
            if (stops(step.actions[*s])) {
                if (!entry.contains("accept")) throw ValidationError("stopping plan states need 'accept'");
                const int accept = hypothesis_index(entry["accept"], k, "plan accept");
                DecisionLabel label_out = DecisionLabel::single(accept);
                if (entry.contains("ties")) {
                    if (!entry["ties"].is_array()) throw ValidationError("plan ties must be an array");
                    label_out.tie_mask = 0;
                    for (const auto& t : entry["ties"]) label_out.tie_mask |= 1U << hypothesis_index(t, k, "plan tie");
                    if (!label_out.in_ties(accept)) throw ValidationError("plan accept must belong to its tie set");
                }
                step.decisions[*s] = label_out;
            }
        }
        for (std::size_t s = 0; s < size; ++s) {
            if (!seen[s]) throw ValidationError("plan has no action for some state at stage " + std::to_string(m));
        }
    }
    return plan;
}

json triviality_to_json(const TrivialityReport& report) {
    return {{"l0", report.l0},
            {"design_value", report.design_value},
            {"take_observations", report.take_observations},
            {"immediate_decision", decision_to_json(report.immediate_decision)}};
}

json trace_to_json(const std::vector<TraceEntry>& trace) {
    json out = json::array();
    for (const auto& t : trace) out.push_back({{"N", t.N}, {"value", t.value}, {"regions_stable", t.regions_stable}});
    return out;
}

json stage_summary_to_json(const ValueTables& values, const TestPlan& plan, const StateLattice& lattice) {
    json out = json::array();
    for (int m = 0; m <= values.N; ++m) {
        const auto& sv = values.stages[static_cast<std::size_t>(m)];
        const auto& stage = lattice.stage(m);
        double r_total = 0.0;
        double v_total = 0.0;
        for (std::size_t s = 0; s < stage.size; ++s) {
            if (!sv.R.empty()) r_total += stage.multiplicity[s] * sv.R[s];
            v_total += stage.multiplicity[s] * sv.V[s];
        }
        json row = {{"m", m}, {"states", stage.size}, {"V_total", v_total}};
        if (!sv.R.empty()) row["R_total"] = r_total;
        if (m >= 1) {
            std::size_t stop = 0, cont = 0, ties = 0;
            for (auto a : plan.stages[static_cast<std::size_t>(m)].actions) {
                if (a == Action::continue_sampling) ++cont;
                else ++stop;
                if (a == Action::boundary_tie) ++ties;
            }
            row["stop_states"] = stop;
            row["continue_states"] = cont;
            row["boundary_ties"] = ties;
        }
        out.push_back(std::move(row));
    }
    return out;
}

json design_to_json(const ValueTables& values, const TestPlan& plan, const StateLattice& lattice,
                    const LagrangeWeights& weights, const TrivialityReport& triviality,
                    const std::vector<TraceEntry>& trace, bool converged, const HypothesisSet& hypotheses) {
    return {{"schema", kSchema},
            {"artifact", "design"},
            {"labels", hypotheses.labels()},
            {"weights", weights_to_json(weights)},
            {"value", values.value},
            {"l0", values.l0},
            {"horizon", values.N},
            {"triviality", triviality_to_json(triviality)},
            {"stages", stage_summary_to_json(values, plan, lattice)},
            {"trace", trace_to_json(trace)},
            {"converged", converged},
            {"boundary_ties", plan.boundary_ties()},
            {"plan", plan_to_json(plan, lattice)}};
}

json oc_to_json(const OperatingCharacteristics& oc, const HypothesisSet& hypotheses) {
    std::vector<std::string> parameters = hypotheses.labels();
    parameters.push_back("mixture");
    return {{"labels", hypotheses.labels()},
            {"parameters", parameters},
            {"horizon", oc.horizon},
            {"alpha", oc.alpha},
            {"beta", oc.beta},
            {"asn", oc.asn},
            {"asn_accept", oc.asn_accept},
            {"stop_mass_deficit", oc.stop_mass_deficit},
            {"lagrangian", oc.lagrangian}};
}

json estimate_to_json(const MonteCarloEstimate& e, const std::optional<AgreementCheck>& check) {
    json out = {{"true", e.parameter.name()},
                {"replications", e.replications},
                {"seed", e.seed},
                {"accept", e.accept},
                {"accept_se", e.accept_se},
                {"asn", e.asn},
                {"asn_se", e.asn_se},
                {"max_sample_size", e.max_sample_size}};
    if (e.parameter.kind == TrueParameter::Kind::hypothesis) {
        out["beta"] = e.beta;
        out["beta_se"] = e.beta_se;
    }
    if (check) {
        json agreement = {{"accept_exact", check->accept_exact},
                          {"accept_z", check->accept_z},
                          {"asn_exact", check->asn_exact},
                          {"asn_z", check->asn_z},
                          {"z_limit", check->z_limit},
                          {"agrees", check->agrees}};
        if (e.parameter.kind == TrueParameter::Kind::hypothesis) {
            agreement["beta_exact"] = check->beta_exact;
            agreement["beta_z"] = check->beta_z;
        }
        out["agreement"] = std::move(agreement);
    }
    return out;
}

json calibration_to_json(const CalibrationResult& r, const CalibrationTarget& target) {
    json constraints = json::array();
    for (std::size_t c = 0; c < r.constraints.size(); ++c) {
        const auto& con = r.constraints[c];
        json entry = {{"i", con.i + 1},
                      {"kind", con.j < 0 ? "beta" : "alpha"},
                      {"target", con.target},
                      {"multiplier", r.multipliers[c]}};
        if (c < r.achieved.size()) {
            entry["achieved"] = r.achieved[c];
            entry["gap"] = r.gaps[c];
            entry["binding"] = static_cast<bool>(r.binding[c]);
            entry["satisfied"] = static_cast<bool>(r.satisfied[c]);
        }
        if (con.j >= 0) entry["j"] = con.j + 1;
        constraints.push_back(std::move(entry));
    }
    json iterations = json::array();
    for (const auto& it : r.iterations) {
        iterations.push_back({{"sweep", it.sweep},
                              {"coordinate", it.coordinate < 0 ? json(nullptr) : json(it.coordinate + 1)},
                              {"multipliers", it.multipliers},
                              {"achieved", it.achieved},
                              {"asn", it.asn},
                              {"value", it.value},
                              {"take_observations", it.take_observations}});
    }
    return {{"schema", kSchema},
            {"artifact", "calibration"},
            {"kind", target.kind == ProblemKind::general ? "problem1" : "problem2"},
            {"slack", target.slack},
            {"status", to_string(r.status)},
            {"message", r.message},
            {"constraints", std::move(constraints)},
            {"weights", weights_to_json(r.weights)},
            {"feasible", r.feasible},
            {"sweeps", r.sweeps},
            {"asn", r.achieved_oc.asn.empty() ? 0.0 : r.achieved_oc.mixture_asn()},
            {"boundary_ties", r.boundary_ties},
            {"triviality", triviality_to_json(r.triviality)},
            {"effective_horizon", r.design.effective_horizon},
            {"design_converged", r.design.converged},
            {"iterations", std::move(iterations)}};
}

std::string design_summary(const ValueTables& values, const TestPlan& plan, const StateLattice& lattice,
                           const TrivialityReport& triviality, const HypothesisSet& hypotheses) {
    std::ostringstream out;
    out << "value (1 + R_0): " << format_number(values.value) << "\n";
    out << "no-observation risk l_0: " << format_number(values.l0) << "\n";
    out << "horizon: " << values.N << "\n";
    if (!triviality.take_observations) {
        out << "trivial design: decide " << hypotheses.label(triviality.immediate_decision.accept)
            << " immediately without observations at risk l_0 = " << format_number(values.l0)
            << "; sequential design value " << format_number(values.value) << "\n";
        return out.str();
    }
    out << "take observations: yes\n";
    const int last = plan.last_continuation_stage();
    if (last == 0) {
        out << "stops at stage 1\n";
    } else {
        out << "last stage with continuation: " << last << "\n";
    }
    out << "boundary ties: " << plan.boundary_ties() << "\n";

    const bool thresholds = lattice.kind() == StateKind::counts && lattice.alphabet_size() == 2;
    out << (thresholds ? "stage regions by count of symbol 1 (* marks boundary ties):\n" : "stage regions:\n");
    for (int m = 1; m <= plan.horizon; ++m) {
        const auto& step = plan.stages[static_cast<std::size_t>(m)];
        out << "  m=" << m << ":";
        if (!thresholds) {
            std::size_t stop = 0, ties = 0;
            for (auto a : step.actions) {
                if (stops(a)) ++stop;
                if (a == Action::boundary_tie) ++ties;
            }
            out << " stop " << stop << ", continue " << step.actions.size() - stop << ", ties " << ties << "\n";
            continue;
        }
        // Count states run c1 = 0, 1, ..., m in lattice order.
        std::size_t s = 0;
        const std::size_t size = step.actions.size();
        bool first = true;
        while (s < size) {
            const bool stop = stops(step.actions[s]);
            const int accept = step.decisions[s].accept;
            std::size_t e = s;
            bool tie = false;
            while (e < size && stops(step.actions[e]) == stop && (!stop || step.decisions[e].accept == accept)) {
                tie = tie || step.actions[e] == Action::boundary_tie;
                ++e;
            }
            const int lo = lattice.label(m, s)[1];
            const int hi = lattice.label(m, e - 1)[1];
            out << (first ? " " : "; ") << (stop ? "stop" : "continue") << " c1 in [" << lo << "," << hi << "]";
            if (stop) out << " -> " << hypotheses.label(accept);
            if (tie) out << " *";
            first = false;
            s = e;
        }
        out << "\n";
    }
    return out.str();
}

} // namespace seqopt::io
