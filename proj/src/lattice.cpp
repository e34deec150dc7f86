#include "seqopt/lattice.hpp"

#include "seqopt/errors.hpp"

#include <cmath>
#include <string>

namespace seqopt {

namespace {

std::size_t states_in_stage(StateKind kind, int alphabet_size, int m) {
    // Composition count C(m+A-1, A-1) or A^m, saturating.
    const double limit = 1e18;
    double total = 1.0;
    if (kind == StateKind::histories) {
        for (int i = 0; i < m && total < limit; ++i) total *= alphabet_size;
    } else {
        for (int i = 1; i < alphabet_size && total < limit; ++i) total = total * (m + i) / i;
        total = std::round(total);
    }
    return total >= limit ? static_cast<std::size_t>(limit) : static_cast<std::size_t>(total);
}

} // namespace

StateLattice::StateLattice(const ProcessModel& model, int horizon, LatticeLimits limits)
    : StateLattice(model, horizon, natural_state_kind(model), limits) {}

StateLattice::StateLattice(const ProcessModel& model, int horizon, StateKind kind, LatticeLimits limits)
    : model_(model), kind_(kind), limits_(limits), alphabet_size_(alphabet_of(model).size()),
      num_hypotheses_(seqopt::num_hypotheses(model)), num_components_(seqopt::num_asn_components(model)) {
    if (kind_ == StateKind::counts && !std::holds_alternative<IidModel>(model_)) {
        throw ValidationError("count states require an i.i.d. model");
    }
    for (int e = 0; e < num_components_; ++e) weights_.push_back(asn_component_weight(model_, e));
    if (horizon < 0) throw ValidationError("horizon must be nonnegative");
    extend(horizon);
}

void StateLattice::extend(int horizon) {
    const int model_limit = max_horizon(model_);
    if (model_limit >= 0 && horizon > model_limit) {
        throw ValidationError("horizon " + std::to_string(horizon) + " exceeds table horizon " +
                              std::to_string(model_limit));
    }
    const double min_p = std::visit([](const auto& m) { return m.min_positive_probability(); }, model_);
    if (std::holds_alternative<IidModel>(model_)) {
        if (horizon * -std::log10(min_p) > -std::log10(limits_.underflow_floor)) {
            throw NumericalGuardError("horizon " + std::to_string(horizon) +
                                      " would drive joint densities below the underflow floor");
        }
    } else if (min_p < limits_.underflow_floor) {
        throw NumericalGuardError("joint table contains masses below the underflow floor");
    }
    std::size_t projected = total_states_;
    for (int m = static_cast<int>(stages_.size()); m <= horizon; ++m) {
        projected += states_in_stage(kind_, alphabet_size_, m);
        if (projected > limits_.state_cap) {
            throw NumericalGuardError("state space up to stage " + std::to_string(m) + " exceeds the cap of " +
                                      std::to_string(limits_.state_cap) + " states");
        }
    }
    while (this->horizon() < horizon) append_stage();
}

std::uint64_t StateLattice::binom(int n, int k) const {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

std::size_t StateLattice::rank_counts(std::span<const int> counts, int n) const {
    // Position in lexicographically descending order of compositions of n.
    std::uint64_t rank = 0;
    int remaining = n;
    for (int t = 0; t + 1 < alphabet_size_; ++t) {
        const int d = alphabet_size_ - t - 2;
        rank += binom(remaining - counts[t] + d, d + 1);
        remaining -= counts[t];
    }
    return static_cast<std::size_t>(rank);
}

void StateLattice::append_stage() {
    const int m = static_cast<int>(stages_.size());
    const std::size_t A = static_cast<std::size_t>(alphabet_size_);
    StageData stage;
    stage.m = m;

    if (kind_ == StateKind::counts) {
        const auto states = count_states_at_stage(alphabet_of(model_), m);
        stage.size = states.size();
        stage.counts.resize(stage.size * A);
        for (std::size_t s = 0; s < stage.size; ++s)
            for (std::size_t a = 0; a < A; ++a) stage.counts[s * A + a] = states[s].counts[a];
    } else {
        stage.size = states_in_stage(kind_, alphabet_size_, m);
    }
    const std::size_t size = stage.size;
    stage.density.resize(static_cast<std::size_t>(num_hypotheses_) * size);
    stage.asn_component.resize(static_cast<std::size_t>(num_components_) * size);
    stage.asn.resize(size);
    stage.multiplicity.resize(size);
    stage.predecessor.assign(size * A, npos);

    const auto* iid = std::get_if<IidModel>(&model_);
    const auto* joint = std::get_if<JointTableModel>(&model_);
    const StageData* prev = m > 0 ? &stages_.back() : nullptr;
    const std::int64_t ssize = static_cast<std::int64_t>(size);

    if (kind_ == StateKind::counts) {
#pragma omp parallel for schedule(static)
        for (std::int64_t si = 0; si < ssize; ++si) {
            const std::size_t s = static_cast<std::size_t>(si);
            CountState state{m, std::vector<int>(stage.counts.begin() + static_cast<std::ptrdiff_t>(s * A),
                                                 stage.counts.begin() + static_cast<std::ptrdiff_t>((s + 1) * A))};
            for (int i = 0; i < num_hypotheses_; ++i) stage.density[i * size + s] = joint_density(*iid, i, state);
            double mix = 0.0;
            for (int e = 0; e < num_components_; ++e) {
                const double d = asn_component_density(*iid, e, state);
                stage.asn_component[e * size + s] = d;
                mix += weights_[e] * d;
            }
            stage.asn[s] = mix;
            stage.multiplicity[s] = multiplicity(state);
            for (std::size_t a = 0; a < A; ++a) {
                if (state.counts[a] == 0) continue;
                state.counts[a] -= 1;
                stage.predecessor[s * A + a] = static_cast<std::uint32_t>(rank_counts(state.counts, m - 1));
                state.counts[a] += 1;
            }
        }
    } else {
#pragma omp parallel for schedule(static)
        for (std::int64_t si = 0; si < ssize; ++si) {
            const std::size_t s = static_cast<std::size_t>(si);
            stage.multiplicity[s] = 1.0;
            if (m == 0) {
                for (int i = 0; i < num_hypotheses_; ++i) stage.density[i * size + s] = 1.0;
                for (int e = 0; e < num_components_; ++e) stage.asn_component[e * size + s] = 1.0;
            } else {
                const std::size_t parent = s / A;
                const std::size_t symbol = s % A;
                stage.predecessor[s * A + symbol] = static_cast<std::uint32_t>(parent);
                if (iid != nullptr) {
                    // Sequential product along the history.
                    for (int i = 0; i < num_hypotheses_; ++i)
                        stage.density[i * size + s] = prev->density[i * prev->size + parent] * iid->pmf(i)[symbol];
                    for (int e = 0; e < num_components_; ++e)
                        stage.asn_component[e * size + s] =
                            prev->asn_component[e * prev->size + parent] * iid->asn_weights()[e].pmf[symbol];
                } else {
                    for (int i = 0; i < num_hypotheses_; ++i)
                        stage.density[i * size + s] = joint->tables(i).by_length[m - 1][s];
                    for (int e = 0; e < num_components_; ++e)
                        stage.asn_component[e * size + s] = joint->asn_tables()[e].tables.by_length[m - 1][s];
                }
            }
            double mix = 0.0;
            for (int e = 0; e < num_components_; ++e) mix += weights_[e] * stage.asn_component[e * size + s];
            stage.asn[s] = mix;
        }
    }

    if (prev != nullptr) {
        StageData& parent = stages_.back();
        parent.successor.assign(parent.size * A, npos);
        for (std::size_t s = 0; s < size; ++s)
            for (std::size_t a = 0; a < A; ++a) {
                const std::uint32_t p = stage.predecessor[s * A + a];
                if (p != npos) parent.successor[p * A + a] = static_cast<std::uint32_t>(s);
            }
    }
    total_states_ += size;
    stages_.push_back(std::move(stage));
}

const StageData& StateLattice::stage(int m) const {
    if (m < 0 || m > horizon()) throw ValidationError("stage " + std::to_string(m) + " outside lattice");
    return stages_[static_cast<std::size_t>(m)];
}

std::span<const double> StateLattice::density(int m, int hypothesis) const {
    const StageData& st = stage(m);
    return std::span<const double>(st.density).subspan(static_cast<std::size_t>(hypothesis) * st.size, st.size);
}

std::span<const double> StateLattice::component_density(int m, int component) const {
    const StageData& st = stage(m);
    return std::span<const double>(st.asn_component).subspan(static_cast<std::size_t>(component) * st.size, st.size);
}

StateLabel StateLattice::label(int m, std::size_t s) const {
    const StageData& st = stage(m);
    if (s >= st.size) throw ValidationError("state index outside stage");
    const std::size_t A = static_cast<std::size_t>(alphabet_size_);
    if (kind_ == StateKind::counts) {
        return StateLabel(st.counts.begin() + static_cast<std::ptrdiff_t>(s * A),
                          st.counts.begin() + static_cast<std::ptrdiff_t>((s + 1) * A));
    }
    StateLabel h(static_cast<std::size_t>(m));
    std::size_t rest = s;
    for (int t = m - 1; t >= 0; --t) {
        h[static_cast<std::size_t>(t)] = static_cast<int>(rest % A);
        rest /= A;
    }
    return h;
}

std::optional<std::size_t> StateLattice::find(int m, const StateLabel& label) const {
    if (m < 0 || m > horizon()) return std::nullopt;
    if (kind_ == StateKind::counts) {
        if (static_cast<int>(label.size()) != alphabet_size_) return std::nullopt;
        int total = 0;
        for (int c : label) {
            if (c < 0) return std::nullopt;
            total += c;
        }
        if (total != m) return std::nullopt;
        return rank_counts(label, m);
    }
    if (static_cast<int>(label.size()) != m) return std::nullopt;
    std::size_t index = 0;
    for (int symbol : label) {
        if (symbol < 0 || symbol >= alphabet_size_) return std::nullopt;
        index = index * static_cast<std::size_t>(alphabet_size_) + static_cast<std::size_t>(symbol);
    }
    return index;
}

} // namespace seqopt
