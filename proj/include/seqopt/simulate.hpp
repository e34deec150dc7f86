#pragma once

#include "seqopt/evaluate.hpp"
#include "seqopt/lattice.hpp"
#include "seqopt/solver.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seqopt {

/// Distribution the observations are drawn from: one hypothesis, or the ASN
/// mixture (a component is drawn once per replication).
struct TrueParameter {
    enum class Kind { hypothesis, mixture };
    Kind kind = Kind::hypothesis;
    int index = 0;

    static TrueParameter hypothesis(int i) { return {Kind::hypothesis, i}; }
    static TrueParameter mixture() { return {Kind::mixture, -1}; }
    std::string name() const;
};

struct SimulationOptions {
    std::size_t replications = 100'000;
    std::uint64_t seed = 1;
    EvaluationOptions ties;
};

struct MonteCarloEstimate {
    TrueParameter parameter;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    /// Acceptance frequency of each hypothesis.
    std::vector<double> accept;
    std::vector<double> accept_se;
    /// Sum of wrong-acceptance frequencies (hypothesis parameters only).
    double beta = 0.0;
    double beta_se = 0.0;
    double asn = 0.0;
    double asn_se = 0.0;
    int max_sample_size = 0;
};

/// Agreement of an estimate with the exact operating characteristics.
struct AgreementCheck {
    std::vector<double> accept_exact;
    std::vector<double> accept_z;
    double beta_exact = 0.0;
    double beta_z = 0.0;
    double asn_exact = 0.0;
    double asn_z = 0.0;
    double z_limit = 3.0;
    bool agrees = false;
};

/// Runs the plan on simulated paths. Replication r uses its own Philox stream
/// keyed by (seed, r), so results are identical for any thread count.
/// Throws ValidationError if a path continues past the plan horizon.
MonteCarloEstimate run_monte_carlo(const StateLattice& lattice, const TestPlan& plan, TrueParameter truth,
                                   const SimulationOptions& options);

/// |estimate - exact| <= z_limit * SE for every reported quantity. A zero
/// plug-in SE falls back to the SE implied by the exact value.
AgreementCheck compare_with_exact(const MonteCarloEstimate& estimate, const OperatingCharacteristics& exact,
                                  double z_limit = 3.0);

} // namespace seqopt
