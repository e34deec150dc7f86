#include "seqopt/reference.hpp"

#include "seqopt/errors.hpp"

#include <algorithm>
#include <map>

namespace seqopt::reference {

namespace {

struct StateInfo {
    StateLabel label;
    std::vector<double> density;
    double asn = 0.0;
};

using Stage = std::vector<StateInfo>;

// Per-stage state lists in canonical order with their densities.
std::vector<Stage> build_stages(const ProcessModel& model, int N, StateKind kind) {
    const int k = num_hypotheses(model);
    const int components = num_asn_components(model);
    const Alphabet& alphabet = alphabet_of(model);
    std::vector<Stage> stages(static_cast<std::size_t>(N) + 1);
    if (kind == StateKind::counts) {
        const auto* iid = std::get_if<IidModel>(&model);
        if (iid == nullptr) throw ValidationError("count states require an i.i.d. model");
        for (int m = 0; m <= N; ++m) {
            for (const auto& state : count_states_at_stage(alphabet, m)) {
                StateInfo info{state.counts, {}, 0.0};
                for (int i = 0; i < k; ++i) info.density.push_back(joint_density(*iid, i, state));
                info.asn = asn_density(*iid, state);
                stages[static_cast<std::size_t>(m)].push_back(std::move(info));
            }
        }
        return stages;
    }
    const auto* iid = std::get_if<IidModel>(&model);
    const auto* joint = std::get_if<JointTableModel>(&model);
    std::vector<double> weights;
    for (int e = 0; e < components; ++e) weights.push_back(asn_component_weight(model, e));
    // Component densities of the previous stage, by history.
    std::map<History, std::pair<std::vector<double>, std::vector<double>>> previous;
    for (int m = 0; m <= N; ++m) {
        std::map<History, std::pair<std::vector<double>, std::vector<double>>> current;
        for (const auto& h : histories_at_stage(alphabet, m)) {
            StateInfo info{h, {}, 0.0};
            std::vector<double> g(static_cast<std::size_t>(components), 1.0);
            if (m == 0) {
                info.density.assign(static_cast<std::size_t>(k), 1.0);
            } else if (iid != nullptr) {
                const auto& [pf, pg] = previous.at(History(h.begin(), h.end() - 1));
                const auto symbol = static_cast<std::size_t>(h.back());
                for (int i = 0; i < k; ++i) info.density.push_back(pf[i] * iid->pmf(i)[symbol]);
                for (int e = 0; e < components; ++e) g[e] = pg[e] * iid->asn_weights()[e].pmf[symbol];
            } else {
                for (int i = 0; i < k; ++i) info.density.push_back(joint->mass(joint->tables(i), h));
                for (int e = 0; e < components; ++e) g[e] = joint->mass(joint->asn_tables()[e].tables, h);
            }
            double mix = 0.0;
            for (int e = 0; e < components; ++e) mix += weights[e] * g[e];
            info.asn = mix;
            current.emplace(h, std::make_pair(info.density, g));
            stages[static_cast<std::size_t>(m)].push_back(std::move(info));
        }
        previous.swap(current);
    }
    return stages;
}

std::vector<StateLabel> successor_labels(const StateLabel& label, StateKind kind, const Alphabet& alphabet, int m) {
    std::vector<StateLabel> out;
    if (kind == StateKind::counts) {
        for (auto& [symbol, next] : successors(CountState{m, label})) out.push_back(std::move(next.counts));
    } else {
        for (auto& [symbol, next] : successors(label, alphabet)) out.push_back(std::move(next));
    }
    return out;
}

} // namespace

Design solve_truncated(const ProcessModel& model, const LagrangeWeights& weights, int N, StateKind kind) {
    if (N < 1) throw ValidationError("truncation horizon must be at least 1");
    if (const int h = max_horizon(model); h >= 0 && N > h) throw ValidationError("horizon exceeds table horizon");
    const auto stages = build_stages(model, N, kind);
    const Alphabet& alphabet = alphabet_of(model);

    Design design;
    design.values.N = N;
    design.values.stages.resize(static_cast<std::size_t>(N) + 1);
    design.plan.kind = PlanKind::truncated;
    design.plan.horizon = N;
    design.plan.state_kind = kind;
    design.plan.alphabet_size = alphabet.size();
    design.plan.num_hypotheses = num_hypotheses(model);
    design.plan.stages.resize(static_cast<std::size_t>(N) + 1);

    std::map<StateLabel, double> value_next;
    for (int m = N; m >= 1; --m) {
        std::map<StateLabel, double> value_here;
        auto& sv = design.values.stages[static_cast<std::size_t>(m)];
        auto& sp = design.plan.stages[static_cast<std::size_t>(m)];
        for (const auto& info : stages[static_cast<std::size_t>(m)]) {
            const StopRisk risk = stop_risk(weights, info.density);
            sv.l.push_back(risk.value);
            sp.decisions.push_back(risk.label);
            double v = risk.value;
            Action action = Action::stop;
            if (m < N) {
                double r = 0.0;
                for (const auto& next : successor_labels(info.label, kind, alphabet, m)) r += value_next.at(next);
                sv.R.push_back(r);
                const double cont = info.asn + r;
                v = std::min(risk.value, cont);
                if (nearly_equal(risk.value, cont)) {
                    action = Action::boundary_tie;
                } else if (risk.value > cont) {
                    action = Action::continue_sampling;
                }
            }
            sv.V.push_back(v);
            sp.actions.push_back(action);
            value_here.emplace(info.label, v);
        }
        value_next.swap(value_here);
    }
    double r0 = 0.0;
    for (const auto& next : successor_labels(stages[0][0].label, kind, alphabet, 0)) r0 += value_next.at(next);
    const StopRisk l0 = no_observation_risk(weights);
    design.values.stages[0].l = {l0.value};
    design.values.stages[0].R = {r0};
    design.values.stages[0].V = {std::min(l0.value, 1.0 + r0)};
    design.values.l0 = l0.value;
    design.values.value = 1.0 + r0;
    return design;
}

OperatingCharacteristics exact_oc(const ProcessModel& model, const TestPlan& plan, const LagrangeWeights& weights,
                                  EvaluationOptions options) {
    const int k = num_hypotheses(model);
    const Alphabet& alphabet = alphabet_of(model);
    const auto stages = build_stages(model, plan.horizon, plan.state_kind);
    OperatingCharacteristics oc;
    oc.k = k;
    oc.horizon = plan.horizon;
    oc.alpha.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
    oc.beta.assign(static_cast<std::size_t>(k), 0.0);
    oc.asn.assign(static_cast<std::size_t>(k) + 1, 0.0);
    oc.asn_accept.assign(static_cast<std::size_t>(k), 0.0);
    oc.stop_mass_deficit.assign(static_cast<std::size_t>(k) + 1, 0.0);

    auto accept = [&](std::vector<double>& row, double p, const DecisionLabel& label) {
        if (options.randomize_decision_ties && label.tie_count() > 1) {
            for (int j : label.tie_set()) row[j] += p / label.tie_count();
        } else {
            row[label.accept] += p;
        }
    };

    // Histories reaching each state while still sampling.
    std::map<StateLabel, double> reach;
    for (const auto& next : successor_labels(stages[0][0].label, plan.state_kind, alphabet, 0)) reach[next] += 1.0;

    for (int m = 1; m <= plan.horizon; ++m) {
        const auto& sp = plan.stages[static_cast<std::size_t>(m)];
        std::map<StateLabel, double> onward;
        const auto& infos = stages[static_cast<std::size_t>(m)];
        for (std::size_t s = 0; s < infos.size(); ++s) {
            const auto it = reach.find(infos[s].label);
            const double w = it == reach.end() ? 0.0 : it->second;
            double psi = 0.0;
            if (sp.actions[s] == Action::stop) psi = 1.0;
            if (sp.actions[s] == Action::boundary_tie) psi = options.randomize_stopping_ties ? 0.5 : 1.0;
            const double stop_w = w * psi;
            if (stop_w != 0.0) {
                for (int i = 0; i < k; ++i) {
                    accept(oc.alpha[i], stop_w * infos[s].density[i], sp.decisions[s]);
                    oc.asn[i] += m * stop_w * infos[s].density[i];
                }
                accept(oc.asn_accept, stop_w * infos[s].asn, sp.decisions[s]);
                oc.asn[k] += m * stop_w * infos[s].asn;
            }
            const double go = w * (1.0 - psi);
            if (go == 0.0) continue;
            if (m == plan.horizon) {
                for (int i = 0; i < k; ++i) oc.stop_mass_deficit[i] += go * infos[s].density[i];
                oc.stop_mass_deficit[k] += go * infos[s].asn;
                continue;
            }
            for (const auto& next : successor_labels(infos[s].label, plan.state_kind, alphabet, m)) onward[next] += go;
        }
        reach.swap(onward);
    }
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j)
            if (j != i) oc.beta[i] += oc.alpha[i][j];
    }
    oc.lagrangian = lagrangian_from_parts(oc, weights);
    return oc;
}

} // namespace seqopt::reference
