#pragma once

#include "seqopt/errors.hpp"
#include "seqopt/lattice.hpp"
#include "seqopt/model.hpp"
#include "seqopt/risk.hpp"

#include <cstdint>
#include <vector>

namespace seqopt {

/// Raised when the stage risk integral does not decay, so truncated designs
/// need not approach the untruncated optimum.
class NonTruncatableError : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

enum class Action : std::uint8_t {
    stop,
    continue_sampling,
    /// Stop, but l_m and f^m + R_m agree to the tie tolerance: any
    /// randomisation between stopping and continuing is equally optimal.
    boundary_tie
};

inline bool stops(Action a) noexcept { return a != Action::continue_sampling; }

/// l_m, R_m^N and V_m^N over the states of one stage. R is empty on stage N.
struct StageValues {
    std::vector<double> l;
    std::vector<double> R;
    std::vector<double> V;
};

struct ValueTables {
    int N = 0;
    /// Indexed by stage 0..N; stage 0 has the single root state.
    std::vector<StageValues> stages;
    double l0 = 0.0;
    /// Minimum of the Lagrangian over tests truncated at N that take at least
    /// one observation: 1 + R_0^N.
    double value = 0.0;
};

enum class PlanKind { truncated, limit };

struct StagePlan {
    std::vector<Action> actions;
    /// Terminal decision for every state (meaningful where the plan stops).
    std::vector<DecisionLabel> decisions;
};

/// Stop/continue labels per stage over lattice states, plus terminal
/// decisions. Stage 0 is never part of the plan; stages_[0] is empty.
struct TestPlan {
    PlanKind kind = PlanKind::truncated;
    int horizon = 0;
    StateKind state_kind = StateKind::counts;
    int alphabet_size = 0;
    int num_hypotheses = 0;
    std::vector<StagePlan> stages;

    std::size_t boundary_ties() const;
    /// Largest stage at which some state continues, 0 if the plan stops at stage 1.
    int last_continuation_stage() const;
};

struct Design {
    ValueTables values;
    TestPlan plan;
};

struct SolverConfig {
    int N_start = 4;
    int N_step = 4;
    int N_max = 512;
    double tolerance = 1e-8;
    bool override_truncatability = false;
    /// Stages checked by the truncatability diagnostic before a limit solve.
    int diagnostic_horizon = 512;
    LatticeLimits limits;
};

struct TraceEntry {
    int N = 0;
    double value = 0.0;
    bool regions_stable = false;
};

struct LimitDesign {
    ValueTables values;
    TestPlan plan;
    std::vector<TraceEntry> trace;
    bool converged = false;
    int effective_horizon = 0;
};

struct TrivialityReport {
    double l0 = 0.0;
    double design_value = 0.0;
    bool take_observations = false;
    /// Decision of the no-observation test.
    DecisionLabel immediate_decision;
};

/// Optimal test truncated at N by backward induction over the lattice
/// (which must reach stage N). States within a stage are processed in
/// parallel; results do not depend on the thread count.
Design solve_truncated(const StateLattice& lattice, const LagrangeWeights& weights, int N);
Design solve_truncated(const ProcessModel& model, const LagrangeWeights& weights, int N, LatticeLimits limits = {});

/// Solves truncated problems for N = N_start, N_start + N_step, ... until the
/// values agree to the tolerance and the stop regions of the early stages
/// stop changing. A non-converged run returns the best design so far with
/// converged == false.
LimitDesign solve_limit(const ProcessModel& model, const LagrangeWeights& weights, const SolverConfig& config);

TrivialityReport triviality_check(const LagrangeWeights& weights, double value);

} // namespace seqopt
