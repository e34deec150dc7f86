#include "seqopt/simulate.hpp"

#include "seqopt/errors.hpp"
#include "seqopt/rng.hpp"

#include <algorithm>
#include <cmath>

namespace seqopt {

std::string TrueParameter::name() const {
    return kind == Kind::mixture ? std::string("mixture") : "H" + std::to_string(index + 1);
}

namespace {

int draw_index(std::span<const double> weights, double u) {
    double cumulative = 0.0;
    const int n = static_cast<int>(weights.size());
    int last_positive = 0;
    for (int a = 0; a < n; ++a) {
        if (weights[static_cast<std::size_t>(a)] <= 0.0) continue;
        last_positive = a;
        cumulative += weights[static_cast<std::size_t>(a)];
        if (u < cumulative) return a;
    }
    return last_positive;
}

struct Outcome {
    int accepted = 0;
    int tau = 0;
};

class PathSampler {
public:
    PathSampler(const StateLattice& lattice, const TestPlan& plan, TrueParameter truth, EvaluationOptions ties)
        : lattice_(lattice), plan_(plan), truth_(truth), ties_(ties) {
        const auto* iid = std::get_if<IidModel>(&lattice.model());
        if (iid) {
            if (truth.kind == TrueParameter::Kind::hypothesis) {
                pmfs_.push_back(iid->pmf(truth.index));
            } else {
                for (const auto& c : iid->asn_weights()) pmfs_.push_back(c.pmf);
            }
        }
    }

    Outcome run(ReplicationStream& rng) const {
        int component = -1;
        if (truth_.kind == TrueParameter::Kind::mixture) {
            component = draw_index(lattice_.component_weights(), rng.next_uniform());
        }
        const int A = lattice_.alphabet_size();
        std::size_t s = 0;
        std::vector<double> conditional(static_cast<std::size_t>(A));
        for (int m = 0;; ++m) {
            if (m >= plan_.horizon) throw ValidationError("simulated path continues past the plan horizon");
            const auto& stage = lattice_.stage(m);
            int symbol;
            if (!pmfs_.empty()) {
                const auto& pmf = pmfs_[component < 0 ? 0 : static_cast<std::size_t>(component)];
                symbol = draw_index(pmf, rng.next_uniform());
            } else {
                const auto here = density(m, s, component);
                for (int a = 0; a < A; ++a) {
                    const auto next = stage.successor[s * static_cast<std::size_t>(A) + static_cast<std::size_t>(a)];
                    conditional[static_cast<std::size_t>(a)] = here > 0.0 ? density(m + 1, next, component) / here : 0.0;
                }
                symbol = draw_index(conditional, rng.next_uniform());
            }
            s = stage.successor[s * static_cast<std::size_t>(A) + static_cast<std::size_t>(symbol)];
            const auto& step = plan_.stages[static_cast<std::size_t>(m + 1)];
            const Action action = step.actions[s];
            bool stop = stops(action);
            if (action == Action::boundary_tie && ties_.randomize_stopping_ties) stop = rng.next_uniform() < 0.5;
            if (!stop) continue;
            const DecisionLabel& label = step.decisions[s];
            int accepted = label.accept;
            if (ties_.randomize_decision_ties && label.tie_count() > 1) {
                const auto ties = label.tie_set();
                const auto pick = static_cast<std::size_t>(rng.next_uniform() * static_cast<double>(ties.size()));
                accepted = ties[std::min(pick, ties.size() - 1)];
            }
            return {accepted, m + 1};
        }
    }

private:
    double density(int m, std::size_t s, int component) const {
        return component < 0 ? lattice_.density(m, truth_.index)[s] : lattice_.component_density(m, component)[s];
    }

    const StateLattice& lattice_;
    const TestPlan& plan_;
    TrueParameter truth_;
    EvaluationOptions ties_;
    std::vector<Pmf> pmfs_;
};

double proportion_se(double p, std::size_t n) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

} // namespace

MonteCarloEstimate run_monte_carlo(const StateLattice& lattice, const TestPlan& plan, TrueParameter truth,
                                   const SimulationOptions& options) {
    const int k = lattice.num_hypotheses();
    if (options.replications < 1) throw ValidationError("at least one replication is required");
    if (truth.kind == TrueParameter::Kind::hypothesis && (truth.index < 0 || truth.index >= k)) {
        throw ValidationError("true hypothesis index out of range");
    }
    if (plan.horizon < 1 || plan.horizon > lattice.horizon() || plan.num_hypotheses != k ||
        plan.state_kind != lattice.kind()) {
        throw ValidationError("plan does not match the lattice");
    }

    const PathSampler sampler(lattice, plan, truth, options.ties);
    const auto n = options.replications;
    std::vector<Outcome> outcomes(n);
    std::string failure;
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < n; ++r) {
        try {
            ReplicationStream rng(options.seed, r);
            outcomes[r] = sampler.run(rng);
        } catch (const std::exception& e) {
#pragma omp critical
            failure = e.what();
        }
    }
    if (!failure.empty()) throw ValidationError(failure);

    // Integer tallies: exact and order independent.
    std::vector<std::uint64_t> accepted(static_cast<std::size_t>(k), 0);
    std::uint64_t tau_sum = 0;
    std::uint64_t tau_sq_sum = 0;
    int tau_max = 0;
    for (const auto& o : outcomes) {
        ++accepted[static_cast<std::size_t>(o.accepted)];
        tau_sum += static_cast<std::uint64_t>(o.tau);
        tau_sq_sum += static_cast<std::uint64_t>(o.tau) * static_cast<std::uint64_t>(o.tau);
        tau_max = std::max(tau_max, o.tau);
    }

    MonteCarloEstimate est;
    est.parameter = truth;
    est.replications = n;
    est.seed = options.seed;
    est.max_sample_size = tau_max;
    const double dn = static_cast<double>(n);
    for (int j = 0; j < k; ++j) {
        const double p = static_cast<double>(accepted[static_cast<std::size_t>(j)]) / dn;
        est.accept.push_back(p);
        est.accept_se.push_back(proportion_se(p, n));
    }
    if (truth.kind == TrueParameter::Kind::hypothesis) {
        est.beta = 1.0 - est.accept[static_cast<std::size_t>(truth.index)];
        est.beta_se = proportion_se(est.beta, n);
    }
    est.asn = static_cast<double>(tau_sum) / dn;
    const double var = n > 1 ? (static_cast<double>(tau_sq_sum) - dn * est.asn * est.asn) / (dn - 1.0) : 0.0;
    est.asn_se = std::sqrt(std::max(var, 0.0) / dn);
    return est;
}

AgreementCheck compare_with_exact(const MonteCarloEstimate& est, const OperatingCharacteristics& exact,
                                  double z_limit) {
    AgreementCheck check;
    check.z_limit = z_limit;
    const auto n = est.replications;
    const bool mixture = est.parameter.kind == TrueParameter::Kind::mixture;
    const auto row = mixture ? std::size_t{0} : static_cast<std::size_t>(est.parameter.index);
    auto z_score = [&](double value, double truth, double se) {
        if (se == 0.0) se = proportion_se(truth, n);
        if (se == 0.0) return value == truth ? 0.0 : INFINITY;
        return std::abs(value - truth) / se;
    };
    bool ok = true;
    for (int j = 0; j < exact.k; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const double truth = mixture ? exact.asn_accept[jj] : exact.alpha[row][jj];
        check.accept_exact.push_back(truth);
        check.accept_z.push_back(z_score(est.accept[jj], truth, est.accept_se[jj]));
        ok = ok && check.accept_z.back() <= z_limit;
    }
    if (!mixture) {
        check.beta_exact = exact.beta[row];
        check.beta_z = z_score(est.beta, check.beta_exact, est.beta_se);
        ok = ok && check.beta_z <= z_limit;
    }
    check.asn_exact = mixture ? exact.asn.back() : exact.asn[row];
    check.asn_z = est.asn_se > 0.0 ? std::abs(est.asn - check.asn_exact) / est.asn_se
                                   : (est.asn == check.asn_exact ? 0.0 : INFINITY);
    ok = ok && check.asn_z <= z_limit;
    check.agrees = ok;
    return check;
}

} // namespace seqopt
