#include "seqopt/evaluate.hpp"

#include "seqopt/errors.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

namespace seqopt {

namespace {

OperatingCharacteristics empty_oc(int k, int horizon) {
    OperatingCharacteristics oc;
    oc.k = k;
    oc.horizon = horizon;
    oc.alpha.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
    oc.beta.assign(static_cast<std::size_t>(k), 0.0);
    oc.asn.assign(static_cast<std::size_t>(k) + 1, 0.0);
    oc.asn_accept.assign(static_cast<std::size_t>(k), 0.0);
    oc.stop_mass_deficit.assign(static_cast<std::size_t>(k) + 1, 0.0);
    return oc;
}

void finish(OperatingCharacteristics& oc, const LagrangeWeights& weights) {
    for (int i = 0; i < oc.k; ++i) {
        double b = 0.0;
        for (int j = 0; j < oc.k; ++j)
            if (j != i) b += oc.alpha[i][j];
        oc.beta[i] = b;
    }
    oc.lagrangian = lagrangian_from_parts(oc, weights);
}

double stop_probability(Action action, const EvaluationOptions& options) {
    switch (action) {
    case Action::stop: return 1.0;
    case Action::boundary_tie: return options.randomize_stopping_ties ? 0.5 : 1.0;
    case Action::continue_sampling: return 0.0;
    }
    return 1.0;
}

// Adds mass p to the acceptance row according to the decision label.
void split_decision(std::vector<double>& row, double p, const DecisionLabel& label, const EvaluationOptions& options) {
    if (options.randomize_decision_ties && label.tie_count() > 1) {
        const double share = p / label.tie_count();
        for (int j = 0; j < static_cast<int>(row.size()); ++j)
            if (label.in_ties(j)) row[j] += share;
    } else {
        row[label.accept] += p;
    }
}

void check_plan(const StateLattice& lattice, const TestPlan& plan, const LagrangeWeights& weights) {
    if (plan.horizon < 1) throw ValidationError("plan has no stages");
    if (plan.state_kind != lattice.kind() || plan.alphabet_size != lattice.alphabet_size()) {
        throw ValidationError("plan state space does not match the model");
    }
    if (plan.num_hypotheses != lattice.num_hypotheses() || weights.size() != lattice.num_hypotheses()) {
        throw ValidationError("plan, weights and model disagree on the number of hypotheses");
    }
    if (plan.horizon > lattice.horizon()) throw ValidationError("plan horizon exceeds the model lattice");
    for (int m = 1; m <= plan.horizon; ++m) {
        const auto& sp = plan.stages[static_cast<std::size_t>(m)];
        if (sp.actions.size() != lattice.stage(m).size || sp.decisions.size() != sp.actions.size()) {
            throw ValidationError("plan stage " + std::to_string(m) + " references states absent from the model");
        }
        for (const auto& d : sp.decisions) {
            if (d.accept < 0 || d.accept >= plan.num_hypotheses || !d.in_ties(d.accept)) {
                throw ValidationError("plan stage " + std::to_string(m) + " has an invalid decision label");
            }
        }
    }
}

} // namespace

double lagrangian_from_parts(const OperatingCharacteristics& oc, const LagrangeWeights& weights) {
    double total = oc.mixture_asn();
    for (int i = 0; i < oc.k; ++i)
        for (int j = 0; j < oc.k; ++j)
            if (j != i) total += weights(i, j) * oc.alpha[i][j];
    return total;
}

OperatingCharacteristics exact_oc(const StateLattice& lattice, const TestPlan& plan, const LagrangeWeights& weights,
                                  EvaluationOptions options) {
    check_plan(lattice, plan, weights);
    const int k = lattice.num_hypotheses();
    const std::size_t A = static_cast<std::size_t>(lattice.alphabet_size());
    OperatingCharacteristics oc = empty_oc(k, plan.horizon);

    // Counting measure of histories that reach each state still sampling,
    // and the probability of continuing from it.
    std::vector<double> weight_prev{1.0};
    std::vector<double> cont_prev{1.0};
    std::vector<double> weight, cont, stop_weight;

    for (int m = 1; m <= plan.horizon; ++m) {
        const StageData& st = lattice.stage(m);
        const StagePlan& sp = plan.stages[static_cast<std::size_t>(m)];
        const std::size_t size = st.size;
        weight.assign(size, 0.0);
        cont.assign(size, 0.0);
        stop_weight.assign(size, 0.0);
        const std::int64_t ssize = static_cast<std::int64_t>(size);

#pragma omp parallel for schedule(static)
        for (std::int64_t si = 0; si < ssize; ++si) {
            const std::size_t s = static_cast<std::size_t>(si);
            double w = 0.0;
            for (std::size_t a = 0; a < A; ++a) {
                const std::uint32_t p = st.predecessor[s * A + a];
                if (p != StateLattice::npos) w += weight_prev[p] * cont_prev[p];
            }
            const double psi = stop_probability(sp.actions[s], options);
            weight[s] = w;
            cont[s] = 1.0 - psi;
            stop_weight[s] = w * psi;
        }

        for (std::size_t s = 0; s < size; ++s) {
            const double sw = stop_weight[s];
            if (sw == 0.0) continue;
            const DecisionLabel& label = sp.decisions[s];
            for (int i = 0; i < k; ++i) {
                const double p = sw * st.density[static_cast<std::size_t>(i) * size + s];
                split_decision(oc.alpha[i], p, label, options);
                oc.asn[i] += m * p;
            }
            const double pm = sw * st.asn[s];
            split_decision(oc.asn_accept, pm, label, options);
            oc.asn[k] += m * pm;
        }
        weight_prev.swap(weight);
        cont_prev.swap(cont);
    }

    const StageData& last = lattice.stage(plan.horizon);
    for (std::size_t s = 0; s < last.size; ++s) {
        const double w = weight_prev[s] * cont_prev[s];
        if (w == 0.0) continue;
        for (int i = 0; i < k; ++i) oc.stop_mass_deficit[i] += w * last.density[static_cast<std::size_t>(i) * last.size + s];
        oc.stop_mass_deficit[k] += w * last.asn[s];
    }
    finish(oc, weights);
    return oc;
}

OperatingCharacteristics exact_oc(const ProcessModel& model, const TestPlan& plan, const LagrangeWeights& weights,
                                  EvaluationOptions options, LatticeLimits limits) {
    StateLattice lattice(model, plan.horizon, plan.state_kind, limits);
    return exact_oc(lattice, plan, weights, options);
}

namespace {

struct OracleWalk {
    const ProcessModel& model;
    const TestPlan& plan;
    const EvaluationOptions& options;
    int N;
    int k;
    int components;
    std::vector<std::map<StateLabel, std::size_t>> index;
    OperatingCharacteristics& oc;
    History history;

    // densities under each hypothesis and each ASN component, computed afresh
    // from the model for the current history
    void densities(std::vector<double>& f, std::vector<double>& g) const {
        f.resize(static_cast<std::size_t>(k));
        g.resize(static_cast<std::size_t>(components));
        if (const auto* iid = std::get_if<IidModel>(&model)) {
            for (int i = 0; i < k; ++i) {
                double d = 1.0;
                for (int x : history) d *= iid->pmf(i)[static_cast<std::size_t>(x)];
                f[i] = d;
            }
            for (int e = 0; e < components; ++e) {
                double d = 1.0;
                for (int x : history) d *= iid->asn_weights()[e].pmf[static_cast<std::size_t>(x)];
                g[e] = d;
            }
        } else {
            const auto& joint = std::get<JointTableModel>(model);
            for (int i = 0; i < k; ++i) f[i] = joint.mass(joint.tables(i), history);
            for (int e = 0; e < components; ++e) g[e] = joint.mass(joint.asn_tables()[e].tables, history);
        }
    }

    std::size_t lookup(int n) const {
        const StateLabel label =
            plan.state_kind == StateKind::counts ? counts_of(history, plan.alphabet_size).counts : history;
        const auto& table = index[static_cast<std::size_t>(n)];
        const auto it = table.find(label);
        if (it == table.end()) throw ValidationError("plan has no entry for a history at stage " + std::to_string(n));
        return it->second;
    }

    // `surviving` is (1-psi_1)...(1-psi_{n-1}) along the current history.
    void visit(double surviving) {
        const int n = static_cast<int>(history.size());
        const std::size_t s = lookup(n);
        const StagePlan& sp = plan.stages[static_cast<std::size_t>(n)];
        const double psi = stop_probability(sp.actions[s], options);
        std::vector<double> f, g;
        densities(f, g);
        if (psi > 0.0) {
            const double term = surviving * psi;
            for (int i = 0; i < k; ++i) {
                split_decision(oc.alpha[i], term * f[i], sp.decisions[s], options);
                oc.asn[i] += n * term * f[i];
            }
            double mix = 0.0;
            for (int e = 0; e < components; ++e) mix += asn_component_weight(model, e) * g[e];
            split_decision(oc.asn_accept, term * mix, sp.decisions[s], options);
            oc.asn[k] += n * term * mix;
        }
        const double onward = surviving * (1.0 - psi);
        if (onward == 0.0) return;
        if (n == N) {
            for (int i = 0; i < k; ++i) oc.stop_mass_deficit[i] += onward * f[i];
            double mix = 0.0;
            for (int e = 0; e < components; ++e) mix += asn_component_weight(model, e) * g[e];
            oc.stop_mass_deficit[k] += onward * mix;
            return;
        }
        for (int a = 0; a < plan.alphabet_size; ++a) {
            history.push_back(a);
            visit(onward);
            history.pop_back();
        }
    }
};

} // namespace

OperatingCharacteristics oracle_oc(const ProcessModel& model, const TestPlan& plan, const LagrangeWeights& weights,
                                   int N, EvaluationOptions options, std::size_t enumeration_cap) {
    if (N < 1 || N > plan.horizon) throw ValidationError("oracle horizon must lie within the plan horizon");
    const int A = alphabet_of(model).size();
    if (A != plan.alphabet_size) throw ValidationError("plan alphabet does not match the model");
    if (plan.state_kind == StateKind::counts && !std::holds_alternative<IidModel>(model)) {
        throw ValidationError("count-state plans need an i.i.d. model");
    }
    double leaves = 1.0;
    for (int n = 0; n < N; ++n) leaves *= A;
    if (leaves > static_cast<double>(enumeration_cap)) {
        throw NumericalGuardError("history enumeration of " + std::to_string(static_cast<long long>(leaves)) +
                                  " leaves exceeds the cap");
    }
    const int k = num_hypotheses(model);
    if (weights.size() != k || plan.num_hypotheses != k) throw ValidationError("hypothesis count mismatch");

    OperatingCharacteristics oc = empty_oc(k, N);
    OracleWalk walk{model, plan, options, N, k, num_asn_components(model), {}, oc, {}};
    walk.index.resize(static_cast<std::size_t>(N) + 1);
    for (int n = 1; n <= N; ++n) {
        auto& table = walk.index[static_cast<std::size_t>(n)];
        if (plan.state_kind == StateKind::counts) {
            const auto states = count_states_at_stage(Alphabet(A), n);
            for (std::size_t s = 0; s < states.size(); ++s) table.emplace(states[s].counts, s);
        } else {
            const auto states = histories_at_stage(Alphabet(A), n);
            for (std::size_t s = 0; s < states.size(); ++s) table.emplace(states[s], s);
        }
        const auto& sp = plan.stages[static_cast<std::size_t>(n)];
        if (sp.actions.size() != table.size() || sp.decisions.size() != table.size()) {
            throw ValidationError("plan stage " + std::to_string(n) + " references states absent from the model");
        }
    }
    for (int a = 0; a < A; ++a) {
        walk.history = {a};
        walk.visit(1.0);
    }
    finish(oc, weights);
    return oc;
}

OperatingCharacteristics trivial_oc(const LagrangeWeights& weights, bool randomize_decision_ties) {
    const int k = weights.size();
    OperatingCharacteristics oc = empty_oc(k, 0);
    const StopRisk l0 = no_observation_risk(weights);
    EvaluationOptions options;
    options.randomize_decision_ties = randomize_decision_ties;
    for (int i = 0; i < k; ++i) split_decision(oc.alpha[i], 1.0, l0.label, options);
    split_decision(oc.asn_accept, 1.0, l0.label, options);
    finish(oc, weights);
    return oc;
}

bool is_bayesian_mixture(const ProcessModel& model) {
    const int k = num_hypotheses(model);
    for (int i = 0; i < k; ++i) {
        bool found = false;
        if (const auto* iid = std::get_if<IidModel>(&model)) {
            for (const auto& c : iid->asn_weights())
                if (c.weight > 0.0 && c.pmf == iid->pmf(i)) found = true;
        } else {
            const auto& joint = std::get<JointTableModel>(model);
            for (const auto& c : joint.asn_tables())
                if (c.weight > 0.0 && c.tables.by_length == joint.tables(i).by_length) found = true;
        }
        if (!found) return false;
    }
    return true;
}

TruncatabilityDiagnostic truncatability_diagnostic(const ProcessModel& model, const LagrangeWeights& weights,
                                                   int n_max, double relative_threshold) {
    if (n_max < 1) throw ValidationError("diagnostic horizon must be at least 1");
    if (const int h = max_horizon(model); h >= 0 && n_max > h) {
        throw ValidationError("diagnostic horizon exceeds table horizon");
    }
    TruncatabilityDiagnostic out;
    for (int n = 1; n <= n_max; ++n) out.points.push_back(DiagnosticPoint{n, stage_risk_integral(model, weights, n)});
    out.threshold = relative_threshold * no_observation_risk(weights).value;
    out.bayesian = is_bayesian_mixture(model);
    const double last = out.points.back().integral;
    out.pass = out.bayesian || last == 0.0 || last < out.threshold;
    return out;
}

} // namespace seqopt
