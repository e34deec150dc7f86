#include "seqopt/calibrate.hpp"

#include "seqopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace seqopt {

std::string to_string(CalibrationStatus status) {
    switch (status) {
    case CalibrationStatus::converged: return "converged";
    case CalibrationStatus::bracketing_failure: return "bracketing_failure";
    case CalibrationStatus::sweep_limit: return "sweep_limit";
    }
    return "unknown";
}

std::vector<Constraint> constraints_of(const CalibrationTarget& target, int k) {
    std::vector<Constraint> out;
    auto check = [](double t) {
        if (!(t > 0.0 && t < 1.0)) throw ValidationError("error targets must lie in (0, 1)");
    };
    if (target.kind == ProblemKind::general) {
        if (target.alpha.size() != static_cast<std::size_t>(k)) throw ValidationError("alpha targets must be k x k");
        for (int i = 0; i < k; ++i) {
            const auto& row = target.alpha[static_cast<std::size_t>(i)];
            if (row.size() != static_cast<std::size_t>(k)) throw ValidationError("alpha targets must be k x k");
            for (int j = 0; j < k; ++j) {
                if (i == j) continue;
                check(row[static_cast<std::size_t>(j)]);
                out.push_back({i, j, row[static_cast<std::size_t>(j)]});
            }
        }
    } else {
        if (target.beta.size() != static_cast<std::size_t>(k)) throw ValidationError("beta targets must have k entries");
        for (int i = 0; i < k; ++i) {
            check(target.beta[static_cast<std::size_t>(i)]);
            out.push_back({i, -1, target.beta[static_cast<std::size_t>(i)]});
        }
    }
    if (!(target.slack >= 0.0 && target.slack < 1.0)) throw ValidationError("slack must lie in [0, 1)");
    return out;
}

LagrangeWeights weights_from_multipliers(ProblemKind kind, int k, const std::vector<Constraint>& constraints,
                                         const std::vector<double>& multipliers) {
    if (kind == ProblemKind::row_constant) return LagrangeWeights::row_constant(multipliers);
    std::vector<std::vector<double>> lambda(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
    for (std::size_t c = 0; c < constraints.size(); ++c) {
        lambda[static_cast<std::size_t>(constraints[c].i)][static_cast<std::size_t>(constraints[c].j)] = multipliers[c];
    }
    return LagrangeWeights::general(lambda);
}

namespace {

struct Evaluation {
    LimitDesign design;
    TrivialityReport triviality;
    OperatingCharacteristics oc;
    std::vector<double> achieved;
};

class Calibrator {
public:
    Calibrator(const ProcessModel& model, const CalibrationTarget& target, const CalibrationConfig& config)
        : model_(model), target_(target), config_(config), k_(num_hypotheses(model)),
          constraints_(constraints_of(target, k_)) {
        if (!(config.bracket_lo > 0.0 && config.bracket_lo < config.bracket_hi)) {
            throw ValidationError("multiplier bracket must satisfy 0 < lo < hi");
        }
        if (!(config.initial >= config.bracket_lo && config.initial <= config.bracket_hi)) {
            throw ValidationError("initial multiplier must lie inside the bracket");
        }
        if (!(config.log_resolution > 0.0)) throw ValidationError("log resolution must be positive");
        if (config.max_sweeps < 1) throw ValidationError("max_sweeps must be positive");
    }

    Evaluation evaluate(const std::vector<double>& multipliers, int sweep, int coordinate) {
        Evaluation ev;
        const auto weights = weights_from_multipliers(target_.kind, k_, constraints_, multipliers);
        // With l0 <= 1 the no-observation test is optimal whatever the horizon.
        auto solver = config_.solver;
        if (no_observation_risk(weights).value <= 1.0) solver.override_truncatability = true;
        ev.design = solve_limit(model_, weights, solver);
        ev.triviality = triviality_check(weights, ev.design.values.value);
        ev.oc = ev.triviality.take_observations
                    ? exact_oc(model_, ev.design.plan, weights, config_.evaluation, config_.solver.limits)
                    : trivial_oc(weights, config_.evaluation.randomize_decision_ties);
        for (const auto& c : constraints_) {
            const auto i = static_cast<std::size_t>(c.i);
            ev.achieved.push_back(c.j < 0 ? ev.oc.beta[i] : ev.oc.alpha[i][static_cast<std::size_t>(c.j)]);
        }
        iterations_.push_back({sweep, coordinate, multipliers, ev.achieved, ev.oc.mixture_asn(),
                               ev.design.values.value, ev.triviality.take_observations});
        return ev;
    }

    bool feasible_at(std::vector<double> multipliers, std::size_t c, double value, int sweep) {
        multipliers[c] = value;
        const auto ev = evaluate(multipliers, sweep, static_cast<int>(c));
        return ev.achieved[c] <= constraints_[c].target;
    }

    /// Smallest multiplier for coordinate c (to the resolution) meeting its
    /// target. The bracket is found by stepping outward from the current value
    /// by factors of ten, clipped to [bracket_lo, bracket_hi].
    std::optional<double> bisect(const std::vector<double>& current, std::size_t c, int sweep) {
        const double floor = config_.bracket_lo;
        const double ceiling = config_.bracket_hi;
        double x = std::clamp(current[c], floor, ceiling);
        double lo = 0.0, hi = 0.0;
        if (feasible_at(current, c, x, sweep)) {
            hi = x;
            while (true) {
                if (hi == floor) return floor;
                const double y = std::max(hi / 10.0, floor);
                if (!feasible_at(current, c, y, sweep)) {
                    lo = y;
                    break;
                }
                hi = y;
            }
        } else {
            lo = x;
            while (true) {
                if (lo == ceiling) return std::nullopt;
                const double y = std::min(lo * 10.0, ceiling);
                if (feasible_at(current, c, y, sweep)) {
                    hi = y;
                    break;
                }
                lo = y;
            }
        }
        while (std::log(hi / lo) > config_.log_resolution) {
            const double mid = std::sqrt(lo * hi);
            if (feasible_at(current, c, mid, sweep)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return hi;
    }

    CalibrationResult run() {
        CalibrationResult result;
        result.constraints = constraints_;
        std::vector<double> current(constraints_.size(), config_.initial);
        result.status = CalibrationStatus::sweep_limit;
        for (int sweep = 1; sweep <= config_.max_sweeps; ++sweep) {
            result.sweeps = sweep;
            std::vector<double> next(current.size());
            bool bracketed = true;
            for (std::size_t c = 0; c < constraints_.size() && bracketed; ++c) {
                std::optional<double> value;
                try {
                    value = bisect(current, c, sweep);
                } catch (const NumericalGuardError& e) {
                    result.status = CalibrationStatus::bracketing_failure;
                    result.message = "constraint " + describe(constraints_[c]) +
                                     ": numerical guard while searching for a bracket: " + e.what();
                    bracketed = false;
                    break;
                }
                if (!value) {
                    bracketed = false;
                    result.status = CalibrationStatus::bracketing_failure;
                    result.message = "constraint " + describe(constraints_[c]) +
                                     " is not met even at the upper end of the multiplier bracket";
                    break;
                }
                next[c] = *value;
            }
            if (!bracketed) break;
            double change = 0.0;
            for (std::size_t c = 0; c < current.size(); ++c) {
                change = std::max(change, std::abs(std::log(next[c] / current[c])));
            }
            current = next;
            if (change <= 4.0 * config_.log_resolution) {
                result.status = CalibrationStatus::converged;
                break;
            }
        }
        if (result.status == CalibrationStatus::sweep_limit) {
            result.message = "multipliers still moving after the sweep limit";
        }

        auto final_eval = evaluate(current, result.sweeps, -1);
        result.multipliers = current;
        result.weights = weights_from_multipliers(target_.kind, k_, constraints_, current);
        result.design = std::move(final_eval.design);
        result.triviality = final_eval.triviality;
        result.achieved_oc = std::move(final_eval.oc);
        result.achieved = final_eval.achieved;
        result.feasible = true;
        for (std::size_t c = 0; c < constraints_.size(); ++c) {
            const double t = constraints_[c].target;
            const double a = result.achieved[c];
            result.gaps.push_back(t - a);
            result.binding.push_back(a >= t * (1.0 - target_.slack));
            result.satisfied.push_back(a <= t * (1.0 + target_.slack));
            result.feasible = result.feasible && result.satisfied.back();
        }
        result.boundary_ties = result.triviality.take_observations ? result.design.plan.boundary_ties() : 0;
        result.iterations = std::move(iterations_);
        return result;
    }

private:
    static std::string describe(const Constraint& c) {
        if (c.j < 0) return "beta_" + std::to_string(c.i + 1);
        return "alpha_" + std::to_string(c.i + 1) + std::to_string(c.j + 1);
    }

    const ProcessModel& model_;
    const CalibrationTarget& target_;
    const CalibrationConfig& config_;
    int k_;
    std::vector<Constraint> constraints_;
    std::vector<CalibrationIterate> iterations_;
};

} // namespace

CalibrationResult fit_multipliers(const ProcessModel& model, const CalibrationTarget& target,
                                  const CalibrationConfig& config) {
    return Calibrator(model, target, config).run();
}

} // namespace seqopt
