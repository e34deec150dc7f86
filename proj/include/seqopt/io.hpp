#pragma once

#include "seqopt/calibrate.hpp"
#include "seqopt/evaluate.hpp"
#include "seqopt/lattice.hpp"
#include "seqopt/model.hpp"
#include "seqopt/risk.hpp"
#include "seqopt/simulate.hpp"
#include "seqopt/solver.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace seqopt::io {

using json = nlohmann::json;

inline constexpr int kSchema = 1;
inline constexpr const char* kToolVersion = "0.1.0";

enum class DesignMode { truncated, limit };

struct DesignSettings {
    DesignMode mode = DesignMode::limit;
    /// Horizon for truncated mode.
    int N = 0;
    SolverConfig solver;
};

/// Hypothesis indices in every document are 1-based.
ProcessModel parse_model(const json& config);
LagrangeWeights parse_weights(const json& config, int k);
bool has_weights(const json& config);
DesignSettings parse_design_settings(const json& config);
CalibrationTarget parse_targets(const json& targets);
CalibrationConfig parse_calibration_config(const json& config, const DesignSettings& design);

json read_json_file(const std::string& path);
/// Pretty-printed with sorted keys and a trailing newline.
std::string dump(const json& document);
void write_text_file(const std::string& path, const std::string& text);

std::string sha256_hex(std::string_view data);

json weights_to_json(const LagrangeWeights& weights);
LagrangeWeights weights_from_json(const json& document);

json decision_to_json(const DecisionLabel& label);

/// Stage -> sorted state/action list. States are count vectors or encoded histories.
json plan_to_json(const TestPlan& plan, const StateLattice& lattice);
/// Rebuilds a plan over the lattice; every state of every stage must be listed.
TestPlan plan_from_json(const json& document, const StateLattice& lattice);

json triviality_to_json(const TrivialityReport& report);
json trace_to_json(const std::vector<TraceEntry>& trace);
/// Per-stage aggregates: state counts by action and multiplicity-weighted sums of R and V.
json stage_summary_to_json(const ValueTables& values, const TestPlan& plan, const StateLattice& lattice);

json design_to_json(const ValueTables& values, const TestPlan& plan, const StateLattice& lattice,
                    const LagrangeWeights& weights, const TrivialityReport& triviality,
                    const std::vector<TraceEntry>& trace, bool converged, const HypothesisSet& hypotheses);

json oc_to_json(const OperatingCharacteristics& oc, const HypothesisSet& hypotheses);
json estimate_to_json(const MonteCarloEstimate& estimate, const std::optional<AgreementCheck>& check);
json calibration_to_json(const CalibrationResult& result, const CalibrationTarget& target);

/// Human-readable design summary. For two-symbol i.i.d. models each stage lists
/// its stop region as ranges of the count of symbol 1.
std::string design_summary(const ValueTables& values, const TestPlan& plan, const StateLattice& lattice,
                           const TrivialityReport& triviality, const HypothesisSet& hypotheses);

} // namespace seqopt::io
