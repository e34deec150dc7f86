#pragma once

// Serial reference implementations of the solver and the forward evaluator.
// They walk states through the model module's enumeration and successor
// functions with ordered maps instead of the lattice's index tables, and
// never run in parallel. Tests and benchmarks compare the parallel kernels
// against them.

#include "seqopt/evaluate.hpp"
#include "seqopt/model.hpp"
#include "seqopt/risk.hpp"
#include "seqopt/solver.hpp"

namespace seqopt::reference {

/// Same recursion and arithmetic order as seqopt::solve_truncated, so values
/// must agree bit for bit with the lattice solver.
Design solve_truncated(const ProcessModel& model, const LagrangeWeights& weights, int N, StateKind kind);

/// Forward evaluation by scattering mass to successors.
OperatingCharacteristics exact_oc(const ProcessModel& model, const TestPlan& plan, const LagrangeWeights& weights,
                                  EvaluationOptions options = {});

} // namespace seqopt::reference
