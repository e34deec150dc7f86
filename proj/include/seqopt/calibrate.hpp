#pragma once

#include "seqopt/evaluate.hpp"
#include "seqopt/model.hpp"
#include "seqopt/risk.hpp"
#include "seqopt/solver.hpp"

#include <string>
#include <vector>

namespace seqopt {

/// Error-probability targets. Problem I bounds each alpha_ij (i != j)
/// individually; Problem II bounds each gross error beta_i.
struct CalibrationTarget {
    ProblemKind kind = ProblemKind::general;
    /// Problem I: k x k, diagonal ignored.
    std::vector<std::vector<double>> alpha;
    /// Problem II: length k.
    std::vector<double> beta;
    /// Relative tolerance applied to every constraint.
    double slack = 0.02;
};

struct CalibrationConfig {
    SolverConfig solver;
    double initial = 100.0;
    double bracket_lo = 1e-2;
    double bracket_hi = 1e6;
    /// Bisection stops once log(hi / lo) is below this.
    double log_resolution = 1e-6;
    int max_sweeps = 40;
    EvaluationOptions evaluation;
};

/// One error constraint; j < 0 marks a gross-error constraint on row i.
struct Constraint {
    int i = 0;
    int j = -1;
    double target = 0.0;
};

struct CalibrationIterate {
    int sweep = 0;
    /// Coordinate being bisected, -1 for a full evaluation.
    int coordinate = -1;
    std::vector<double> multipliers;
    std::vector<double> achieved;
    double asn = 0.0;
    double value = 0.0;
    bool take_observations = false;
};

enum class CalibrationStatus { converged, bracketing_failure, sweep_limit };

std::string to_string(CalibrationStatus status);

struct CalibrationResult {
    CalibrationStatus status = CalibrationStatus::sweep_limit;
    std::string message;
    std::vector<Constraint> constraints;
    /// Multiplier per constraint coordinate.
    std::vector<double> multipliers;
    LagrangeWeights weights = LagrangeWeights::uniform(2, 0.0);
    LimitDesign design;
    TrivialityReport triviality;
    OperatingCharacteristics achieved_oc;
    std::vector<double> achieved;
    /// target - achieved per constraint.
    std::vector<double> gaps;
    /// achieved >= target * (1 - slack).
    std::vector<bool> binding;
    /// achieved <= target * (1 + slack).
    std::vector<bool> satisfied;
    bool feasible = false;
    int sweeps = 0;
    /// Boundary-tie states of the final plan; randomising there can close gaps.
    std::size_t boundary_ties = 0;
    std::vector<CalibrationIterate> iterations;
};

std::vector<Constraint> constraints_of(const CalibrationTarget& target, int k);
LagrangeWeights weights_from_multipliers(ProblemKind kind, int k, const std::vector<Constraint>& constraints,
                                         const std::vector<double>& multipliers);

/// Searches for multipliers whose optimal design meets the targets with the
/// smallest multipliers possible. Each sweep bisects every coordinate on a
/// log scale while holding the others at the previous sweep's values, so
/// symmetric problems keep symmetric multipliers.
CalibrationResult fit_multipliers(const ProcessModel& model, const CalibrationTarget& target,
                                  const CalibrationConfig& config = {});

} // namespace seqopt
