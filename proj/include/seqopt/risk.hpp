#pragma once

#include "seqopt/model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace seqopt {

/// Relative slack used for every argmin and stop/continue comparison.
inline constexpr double kTieTolerance = 1e-9;

/// True when a and b agree to the relative tie tolerance.
bool nearly_equal(double a, double b) noexcept;

enum class ProblemKind {
    general,      ///< individual error constraints, one multiplier per (i, j)
    row_constant  ///< gross error constraints, lambda_ij = lambda_i
};

/// Multipliers lambda_ij >= 0 for i != j. The diagonal is ignored and stored as 0.
class LagrangeWeights {
public:
    static LagrangeWeights general(const std::vector<std::vector<double>>& lambda);
    static LagrangeWeights row_constant(const std::vector<double>& rows);
    static LagrangeWeights uniform(int k, double value);

    int size() const noexcept { return k_; }
    ProblemKind kind() const noexcept { return kind_; }
    double operator()(int i, int j) const noexcept { return values_[static_cast<std::size_t>(i * k_ + j)]; }
    /// For row-constant weights, lambda_i.
    double row(int i) const;
    std::vector<std::vector<double>> matrix() const;

    LagrangeWeights scaled(double factor) const;
    bool all_zero() const noexcept;

private:
    LagrangeWeights(int k, ProblemKind kind, std::vector<double> values);

    int k_ = 0;
    ProblemKind kind_ = ProblemKind::general;
    std::vector<double> values_;
};

/// Terminal decision: the canonical accepted hypothesis and every index
/// attaining the minimum weighted error. Any randomisation over the tie set
/// is optimal; the canonical choice is the smallest index.
struct DecisionLabel {
    int accept = 0;
    std::uint32_t tie_mask = 0;

    bool in_ties(int j) const noexcept { return (tie_mask >> j) & 1U; }
    int tie_count() const noexcept;
    std::vector<int> tie_set() const;
    static DecisionLabel single(int j) { return DecisionLabel{j, 1U << j}; }
};

struct StopRisk {
    double value = 0.0;
    DecisionLabel label;
};

/// l = min_j sum_{i != j} lambda_ij f_i for the given per-hypothesis densities.
StopRisk stop_risk(const LagrangeWeights& weights, std::span<const double> densities);
StopRisk stop_risk(const ProcessModel& model, const LagrangeWeights& weights, std::span<const int> history);
StopRisk stop_risk(const IidModel& model, const LagrangeWeights& weights, const CountState& state);

/// Risk of deciding without any observation: every density equals 1.
StopRisk no_observation_risk(const LagrangeWeights& weights);

/// Sum of l_n over all length-n histories: the smallest weighted error sum of
/// any fixed-sample-size-n test.
double stage_risk_integral(const ProcessModel& model, const LagrangeWeights& weights, int n);

} // namespace seqopt
