#include "seqopt/solver.hpp"

#include "seqopt/errors.hpp"
#include "seqopt/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace seqopt {

std::size_t TestPlan::boundary_ties() const {
    std::size_t n = 0;
    for (const auto& st : stages)
        n += static_cast<std::size_t>(std::count(st.actions.begin(), st.actions.end(), Action::boundary_tie));
    return n;
}

int TestPlan::last_continuation_stage() const {
    int last = 0;
    for (int m = 1; m < static_cast<int>(stages.size()); ++m) {
        const auto& acts = stages[static_cast<std::size_t>(m)].actions;
        if (std::any_of(acts.begin(), acts.end(), [](Action a) { return !stops(a); })) last = m;
    }
    return last;
}

Design solve_truncated(const StateLattice& lattice, const LagrangeWeights& weights, int N) {
    if (N < 1) throw ValidationError("truncation horizon must be at least 1");
    if (N > lattice.horizon()) throw ValidationError("lattice does not reach the truncation horizon");
    const int k = lattice.num_hypotheses();
    if (weights.size() != k) throw ValidationError("weights do not match the number of hypotheses");
    const std::size_t A = static_cast<std::size_t>(lattice.alphabet_size());

    Design design;
    ValueTables& values = design.values;
    TestPlan& plan = design.plan;
    values.N = N;
    values.stages.resize(static_cast<std::size_t>(N) + 1);
    plan.kind = PlanKind::truncated;
    plan.horizon = N;
    plan.state_kind = lattice.kind();
    plan.alphabet_size = lattice.alphabet_size();
    plan.num_hypotheses = k;
    plan.stages.resize(static_cast<std::size_t>(N) + 1);

    for (int m = N; m >= 1; --m) {
        const StageData& st = lattice.stage(m);
        const std::size_t size = st.size;
        StageValues& sv = values.stages[static_cast<std::size_t>(m)];
        StagePlan& sp = plan.stages[static_cast<std::size_t>(m)];
        sv.l.resize(size);
        sv.V.resize(size);
        if (m < N) sv.R.resize(size);
        sp.actions.resize(size);
        sp.decisions.resize(size);
        const StageValues* next = m < N ? &values.stages[static_cast<std::size_t>(m) + 1] : nullptr;
        const std::int64_t ssize = static_cast<std::int64_t>(size);

#pragma omp parallel for schedule(static)
        for (std::int64_t si = 0; si < ssize; ++si) {
            const std::size_t s = static_cast<std::size_t>(si);
            double f[32];
            for (int i = 0; i < k; ++i) f[i] = st.density[static_cast<std::size_t>(i) * size + s];
            const StopRisk risk = stop_risk(weights, std::span<const double>(f, static_cast<std::size_t>(k)));
            sv.l[s] = risk.value;
            sp.decisions[s] = risk.label;
            if (next == nullptr) {
                sv.V[s] = risk.value;
                sp.actions[s] = Action::stop;
                continue;
            }
            double r = 0.0;
            for (std::size_t a = 0; a < A; ++a) r += next->V[st.successor[s * A + a]];
            sv.R[s] = r;
            const double cont = st.asn[s] + r;
            sv.V[s] = std::min(risk.value, cont);
            if (nearly_equal(risk.value, cont)) {
                sp.actions[s] = Action::boundary_tie;
            } else {
                sp.actions[s] = risk.value <= cont ? Action::stop : Action::continue_sampling;
            }
        }
    }

    const StageData& root = lattice.stage(0);
    StageValues& sv0 = values.stages[0];
    double r0 = 0.0;
    for (std::size_t a = 0; a < A; ++a) r0 += values.stages[1].V[root.successor[a]];
    const StopRisk l0 = no_observation_risk(weights);
    sv0.l = {l0.value};
    sv0.R = {r0};
    sv0.V = {std::min(l0.value, 1.0 + r0)};
    values.l0 = l0.value;
    values.value = 1.0 + r0;
    return design;
}

Design solve_truncated(const ProcessModel& model, const LagrangeWeights& weights, int N, LatticeLimits limits) {
    if (N < 1) throw ValidationError("truncation horizon must be at least 1");
    StateLattice lattice(model, N, limits);
    return solve_truncated(lattice, weights, N);
}

namespace {

bool early_regions_agree(const TestPlan& shorter, const TestPlan& longer, int last_stage) {
    for (int m = 1; m <= last_stage; ++m) {
        const auto& a = shorter.stages[static_cast<std::size_t>(m)].actions;
        const auto& b = longer.stages[static_cast<std::size_t>(m)].actions;
        if (a.size() != b.size()) return false;
        for (std::size_t s = 0; s < a.size(); ++s)
            if (stops(a[s]) != stops(b[s])) return false;
    }
    return true;
}

} // namespace

LimitDesign solve_limit(const ProcessModel& model, const LagrangeWeights& weights, const SolverConfig& config) {
    if (config.N_start < 1 || config.N_step < 1) throw ValidationError("N_start and N_step must be positive");
    if (!(config.tolerance > 0.0)) throw ValidationError("tolerance must be positive");
    int n_max = config.N_max;
    int n_start = config.N_start;
    if (const int table_horizon = max_horizon(model); table_horizon >= 0) {
        n_max = std::min(n_max, table_horizon);
        n_start = std::min(n_start, table_horizon);
    }
    if (n_max < n_start) throw ValidationError("N_max must be at least N_start");

    if (!config.override_truncatability) {
        int horizon = config.diagnostic_horizon;
        if (const int table_horizon = max_horizon(model); table_horizon >= 0) horizon = std::min(horizon, table_horizon);
        horizon = std::max(horizon, 1);
        const double integral = stage_risk_integral(model, weights, horizon);
        const double threshold = 1e-3 * no_observation_risk(weights).value;
        if (!(is_bayesian_mixture(model) || integral == 0.0 || integral < threshold)) {
            throw NonTruncatableError("truncatability diagnostic failed: stage risk integral at n=" +
                                      std::to_string(horizon) + " is " + std::to_string(integral) + ", threshold " +
                                      std::to_string(threshold));
        }
    }

    StateLattice lattice(model, n_start, config.limits);
    int N = n_start;
    Design current = solve_truncated(lattice, weights, N);
    LimitDesign out;
    out.trace.push_back(TraceEntry{N, current.values.value, false});

    while (true) {
        const int next_N = N + config.N_step;
        if (next_N > n_max) break;
        lattice.extend(next_N);
        Design next = solve_truncated(lattice, weights, next_N);
        const bool stable = early_regions_agree(current.plan, next.plan, std::min(n_start, N - 1));
        out.trace.push_back(TraceEntry{next_N, next.values.value, stable});
        const bool value_close = std::abs(current.values.value - next.values.value) < config.tolerance;
        current = std::move(next);
        N = next_N;
        if (value_close && stable) {
            out.converged = true;
            break;
        }
    }
    out.values = std::move(current.values);
    out.plan = std::move(current.plan);
    out.plan.kind = PlanKind::limit;
    out.effective_horizon = N;
    return out;
}

TrivialityReport triviality_check(const LagrangeWeights& weights, double value) {
    const StopRisk l0 = no_observation_risk(weights);
    TrivialityReport report;
    report.l0 = l0.value;
    report.design_value = value;
    report.take_observations = l0.value > value;
    report.immediate_decision = l0.label;
    return report;
}

} // namespace seqopt
