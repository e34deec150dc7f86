#pragma once

#include "seqopt/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace seqopt {

/// Per-stage arrays over the states at stage m. Densities are stored
/// hypothesis-major: density[i * size + s].
struct StageData {
    int m = 0;
    std::size_t size = 0;
    std::vector<double> density;
    std::vector<double> asn_component;
    std::vector<double> asn;
    /// Number of histories each state stands for (1 for histories).
    std::vector<double> multiplicity;
    /// successor[s * A + a]: index at stage m+1; empty on the last stage.
    std::vector<std::uint32_t> successor;
    /// predecessor[s * A + a]: index at stage m-1 reached by dropping one
    /// symbol a, or StateLattice::npos.
    std::vector<std::uint32_t> predecessor;
    /// Count vectors, size * A (counts kind only).
    std::vector<int> counts;
};

struct LatticeLimits {
    std::size_t state_cap = 2'000'000;
    /// Smallest joint density the guard allows before refusing to build.
    double underflow_floor = 1e-280;
};

/// The state space of the dynamic program, stages 0..horizon. Count states
/// are the sufficient statistic for i.i.d. models; histories cover any model.
/// Immutable once built except through extend(), which only appends stages.
class StateLattice {
public:
    static constexpr std::uint32_t npos = UINT32_MAX;

    StateLattice(const ProcessModel& model, int horizon, StateKind kind, LatticeLimits limits = {});
    StateLattice(const ProcessModel& model, int horizon, LatticeLimits limits = {});

    void extend(int horizon);

    const ProcessModel& model() const noexcept { return model_; }
    StateKind kind() const noexcept { return kind_; }
    int horizon() const noexcept { return static_cast<int>(stages_.size()) - 1; }
    int alphabet_size() const noexcept { return alphabet_size_; }
    int num_hypotheses() const noexcept { return num_hypotheses_; }
    int num_components() const noexcept { return num_components_; }
    const std::vector<double>& component_weights() const noexcept { return weights_; }
    const LatticeLimits& limits() const noexcept { return limits_; }

    const StageData& stage(int m) const;
    std::size_t total_states() const noexcept { return total_states_; }

    std::span<const double> density(int m, int hypothesis) const;
    std::span<const double> component_density(int m, int component) const;

    StateLabel label(int m, std::size_t s) const;
    std::optional<std::size_t> find(int m, const StateLabel& label) const;

private:
    void append_stage();
    std::size_t rank_counts(std::span<const int> counts, int n) const;
    std::uint64_t binom(int n, int k) const;

    ProcessModel model_;
    StateKind kind_;
    LatticeLimits limits_;
    int alphabet_size_;
    int num_hypotheses_;
    int num_components_;
    std::vector<double> weights_;
    std::vector<StageData> stages_;
    std::size_t total_states_ = 0;
};

} // namespace seqopt
