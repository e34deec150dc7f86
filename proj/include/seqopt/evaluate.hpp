#pragma once

#include "seqopt/lattice.hpp"
#include "seqopt/model.hpp"
#include "seqopt/risk.hpp"
#include "seqopt/solver.hpp"

#include <cstddef>
#include <vector>

namespace seqopt {

/// Error probabilities, expected sample sizes and the Lagrangian of a test.
///
/// alpha[i][j] is the probability under hypothesis i of accepting H_j. The
/// diagonal holds the probability of a correct decision (the error
/// probabilities are the off-diagonal entries), so every row sums to
/// 1 - stop_mass_deficit[i].
///
/// asn and stop_mass_deficit have k + 1 entries: one per hypothesis, then the
/// ASN mixture. asn counts only stops up to the plan horizon; mass that never
/// stops by then is reported in stop_mass_deficit.
struct OperatingCharacteristics {
    int k = 0;
    std::vector<std::vector<double>> alpha;
    std::vector<double> beta;
    std::vector<double> asn;
    /// Acceptance probabilities under the ASN mixture.
    std::vector<double> asn_accept;
    std::vector<double> stop_mass_deficit;
    double lagrangian = 0.0;
    int horizon = 0;

    double mixture_asn() const { return asn.back(); }
};

/// Tie handling during evaluation. Defaults match the canonical plan:
/// boundary ties stop, decision ties accept the smallest index.
struct EvaluationOptions {
    /// Stop with probability 1/2 at boundary-tie states.
    bool randomize_stopping_ties = false;
    /// Accept uniformly over the tie set.
    bool randomize_decision_ties = false;
};

/// Lagrangian assembled from its pieces, always in row-major order:
/// mixture ASN + sum_i sum_{j != i} lambda_ij alpha_ij.
double lagrangian_from_parts(const OperatingCharacteristics& oc, const LagrangeWeights& weights);

/// Forward pass over the lattice: propagates the measure of continuing
/// histories stage by stage and splits it at stopping states.
OperatingCharacteristics exact_oc(const StateLattice& lattice, const TestPlan& plan, const LagrangeWeights& weights,
                                  EvaluationOptions options = {});
OperatingCharacteristics exact_oc(const ProcessModel& model, const TestPlan& plan, const LagrangeWeights& weights,
                                  EvaluationOptions options = {}, LatticeLimits limits = {});

/// Independent check: walks every history of length <= N, applies the plan
/// literally and sums (1-psi_1)...(1-psi_{n-1}) psi_n phi_n^j f^n.
OperatingCharacteristics oracle_oc(const ProcessModel& model, const TestPlan& plan, const LagrangeWeights& weights,
                                   int N, EvaluationOptions options = {}, std::size_t enumeration_cap = 10'000'000);

/// The no-observation test: ASN 0, decision from no_observation_risk.
OperatingCharacteristics trivial_oc(const LagrangeWeights& weights, bool randomize_decision_ties = false);

struct DiagnosticPoint {
    int n = 0;
    double integral = 0.0;
};

struct TruncatabilityDiagnostic {
    std::vector<DiagnosticPoint> points;
    double threshold = 0.0;
    /// Every hypothesis appears in the ASN mixture with positive weight; such
    /// problems are truncatable regardless of the sequence.
    bool bayesian = false;
    bool pass = false;
};

/// Stage risk integrals for n = 1..n_max with a pass verdict when the last
/// one is below relative_threshold * l0 (or is exactly zero).
TruncatabilityDiagnostic truncatability_diagnostic(const ProcessModel& model, const LagrangeWeights& weights,
                                                   int n_max, double relative_threshold = 1e-3);

bool is_bayesian_mixture(const ProcessModel& model);

} // namespace seqopt
