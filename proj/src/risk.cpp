#include "seqopt/risk.hpp"

#include "seqopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seqopt {

bool nearly_equal(double a, double b) noexcept {
    return std::abs(a - b) <= kTieTolerance * std::max(std::abs(a), std::abs(b));
}

LagrangeWeights::LagrangeWeights(int k, ProblemKind kind, std::vector<double> values)
    : k_(k), kind_(kind), values_(std::move(values)) {
    if (k_ < 2) throw ValidationError("Lagrange weights need at least two hypotheses");
    if (k_ > 32) throw ValidationError("at most 32 hypotheses are supported");
    for (int i = 0; i < k_; ++i) {
        for (int j = 0; j < k_; ++j) {
            double& v = values_[static_cast<std::size_t>(i * k_ + j)];
            if (i == j) {
                v = 0.0;
                continue;
            }
            if (!std::isfinite(v) || v < 0.0) throw ValidationError("Lagrange multipliers must be finite and >= 0");
        }
    }
}

LagrangeWeights LagrangeWeights::general(const std::vector<std::vector<double>>& lambda) {
    const int k = static_cast<int>(lambda.size());
    std::vector<double> values;
    for (const auto& row : lambda) {
        if (static_cast<int>(row.size()) != k) throw ValidationError("lambda must be a square matrix");
        values.insert(values.end(), row.begin(), row.end());
    }
    return LagrangeWeights(k, ProblemKind::general, std::move(values));
}

LagrangeWeights LagrangeWeights::row_constant(const std::vector<double>& rows) {
    const int k = static_cast<int>(rows.size());
    std::vector<double> values(static_cast<std::size_t>(k * k), 0.0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) values[static_cast<std::size_t>(i * k + j)] = rows[static_cast<std::size_t>(i)];
    return LagrangeWeights(k, ProblemKind::row_constant, std::move(values));
}

LagrangeWeights LagrangeWeights::uniform(int k, double value) {
    return LagrangeWeights(k, ProblemKind::general, std::vector<double>(static_cast<std::size_t>(k * k), value));
}

double LagrangeWeights::row(int i) const {
    if (kind_ != ProblemKind::row_constant) throw ValidationError("row multipliers exist only for row-constant weights");
    return (*this)(i, i == 0 ? 1 : 0);
}

std::vector<std::vector<double>> LagrangeWeights::matrix() const {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(k_), std::vector<double>(static_cast<std::size_t>(k_)));
    for (int i = 0; i < k_; ++i)
        for (int j = 0; j < k_; ++j) out[i][j] = (*this)(i, j);
    return out;
}

LagrangeWeights LagrangeWeights::scaled(double factor) const {
    if (!(factor > 0.0)) throw ValidationError("scale factor must be positive");
    std::vector<double> values = values_;
    for (double& v : values) v *= factor;
    return LagrangeWeights(k_, kind_, std::move(values));
}

bool LagrangeWeights::all_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

int DecisionLabel::tie_count() const noexcept {
    int c = 0;
    for (std::uint32_t m = tie_mask; m != 0; m &= m - 1) ++c;
    return c;
}

std::vector<int> DecisionLabel::tie_set() const {
    std::vector<int> out;
    for (int j = 0; j < 32; ++j)
        if (in_ties(j)) out.push_back(j);
    return out;
}

StopRisk stop_risk(const LagrangeWeights& weights, std::span<const double> densities) {
    const int k = weights.size();
    double sums[32];
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
        double s = 0.0;
        for (int i = 0; i < k; ++i) {
            if (i != j) s += weights(i, j) * densities[static_cast<std::size_t>(i)];
        }
        sums[j] = s;
        best = std::min(best, s);
    }
    StopRisk out;
    out.value = best;
    out.label.accept = -1;
    for (int j = 0; j < k; ++j) {
        if (sums[j] - best <= kTieTolerance * sums[j]) {
            out.label.tie_mask |= 1U << j;
            if (out.label.accept < 0) out.label.accept = j;
        }
    }
    return out;
}

StopRisk stop_risk(const ProcessModel& model, const LagrangeWeights& weights, std::span<const int> history) {
    const int k = num_hypotheses(model);
    if (weights.size() != k) throw ValidationError("weights do not match the number of hypotheses");
    std::vector<double> f(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) f[i] = joint_density(model, i, history);
    return stop_risk(weights, f);
}

StopRisk stop_risk(const IidModel& model, const LagrangeWeights& weights, const CountState& state) {
    const int k = model.num_hypotheses();
    if (weights.size() != k) throw ValidationError("weights do not match the number of hypotheses");
    std::vector<double> f(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) f[i] = joint_density(model, i, state);
    return stop_risk(weights, f);
}

StopRisk no_observation_risk(const LagrangeWeights& weights) {
    std::vector<double> ones(static_cast<std::size_t>(weights.size()), 1.0);
    return stop_risk(weights, ones);
}

double stage_risk_integral(const ProcessModel& model, const LagrangeWeights& weights, int n) {
    if (n < 1) throw ValidationError("stage risk integral needs n >= 1");
    if (weights.size() != num_hypotheses(model)) throw ValidationError("weights do not match the number of hypotheses");
    double total = 0.0;
    if (const auto* iid = std::get_if<IidModel>(&model)) {
        for (const auto& state : count_states_at_stage(iid->alphabet(), n)) {
            total += multiplicity(state) * stop_risk(*iid, weights, state).value;
        }
        return total;
    }
    for (const auto& h : states_at_stage(model, n)) total += stop_risk(model, weights, h).value;
    return total;
}

} // namespace seqopt
