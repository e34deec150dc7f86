#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace seqopt {

/// Finite observation alphabet; symbols are 0..size-1. The dominating
/// measure is counting measure, so every integral over an observation is a
/// finite sum over symbols.
class Alphabet {
public:
    explicit Alphabet(int size);
    int size() const noexcept { return size_; }
    bool contains(int symbol) const noexcept { return symbol >= 0 && symbol < size_; }

private:
    int size_;
};

/// The k simple hypotheses under test. Labels are only used for reporting.
class HypothesisSet {
public:
    explicit HypothesisSet(std::vector<std::string> labels);
    static HypothesisSet numbered(int k);

    int size() const noexcept { return static_cast<int>(labels_.size()); }
    const std::string& label(int index) const;
    const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
    std::vector<std::string> labels_;
};

using Pmf = std::vector<double>;

/// One component of the distribution the expected sample size is averaged
/// over. A single component with weight 1 is the fixed-parameter case.
struct AsnComponent {
    Pmf pmf;
    double weight = 1.0;
};

/// Sufficient statistic for i.i.d. observations: stage n and per-symbol
/// occurrence counts summing to n.
struct CountState {
    int n = 0;
    std::vector<int> counts;

    static CountState root(int alphabet_size);
    auto operator<=>(const CountState&) const = default;
};

/// Explicit observation history x_1..x_n.
using History = std::vector<int>;

/// i.i.d. observations: the joint density of a history is the product of
/// per-symbol probabilities, so it depends on the history only through counts.
class IidModel {
public:
    IidModel(Alphabet alphabet, HypothesisSet hypotheses, std::vector<Pmf> pmfs,
             std::vector<AsnComponent> asn_weights);

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    const HypothesisSet& hypotheses() const noexcept { return hypotheses_; }
    int num_hypotheses() const noexcept { return hypotheses_.size(); }
    const Pmf& pmf(int hypothesis) const;
    const std::vector<Pmf>& pmfs() const noexcept { return pmfs_; }
    const std::vector<AsnComponent>& asn_weights() const noexcept { return asn_weights_; }

    /// Smallest strictly positive probability across hypotheses and ASN components.
    double min_positive_probability() const noexcept;

private:
    Alphabet alphabet_;
    HypothesisSet hypotheses_;
    std::vector<Pmf> pmfs_;
    std::vector<AsnComponent> asn_weights_;
};

/// Joint probability tables for every history length 1..horizon, one set per
/// hypothesis and per ASN component. Supports dependent processes at small
/// horizons. tables[n-1][h] is the mass of the history with base-A index h
/// (first symbol most significant).
struct JointTables {
    std::vector<std::vector<double>> by_length;
};

struct AsnJointComponent {
    JointTables tables;
    double weight = 1.0;
};

class JointTableModel {
public:
    JointTableModel(Alphabet alphabet, HypothesisSet hypotheses, std::vector<JointTables> tables,
                    std::vector<AsnJointComponent> asn_tables);

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    const HypothesisSet& hypotheses() const noexcept { return hypotheses_; }
    int num_hypotheses() const noexcept { return hypotheses_.size(); }
    int horizon() const noexcept { return horizon_; }
    const JointTables& tables(int hypothesis) const;
    const std::vector<AsnJointComponent>& asn_tables() const noexcept { return asn_tables_; }

    /// Mass of a history under a table set; 1 for the empty history.
    double mass(const JointTables& tables, std::span<const int> history) const;

    double min_positive_probability() const noexcept;

private:
    Alphabet alphabet_;
    HypothesisSet hypotheses_;
    std::vector<JointTables> tables_;
    std::vector<AsnJointComponent> asn_tables_;
    int horizon_ = 0;
};

using ProcessModel = std::variant<IidModel, JointTableModel>;

/// Whether states of a model are count vectors or full histories.
enum class StateKind { counts, histories };

/// Generic state label: a count vector (StateKind::counts) or a symbol
/// sequence (StateKind::histories).
using StateLabel = std::vector<int>;

const Alphabet& alphabet_of(const ProcessModel& model);
const HypothesisSet& hypotheses_of(const ProcessModel& model);
int num_hypotheses(const ProcessModel& model);
int num_asn_components(const ProcessModel& model);
double asn_component_weight(const ProcessModel& model, int component);
StateKind natural_state_kind(const ProcessModel& model);
/// Largest supported stage, or -1 when unbounded (i.i.d.).
int max_horizon(const ProcessModel& model);

/// f_{theta_i}^n on a concrete history. The empty history has density 1.
double joint_density(const ProcessModel& model, int hypothesis, std::span<const int> history);
/// f_{theta_i}^n on a count state: prod_a p_i(a)^{c_a}.
double joint_density(const IidModel& model, int hypothesis, const CountState& state);

/// Mixture density sum_e w_e f_e^n that weights the expected sample size.
double asn_density(const ProcessModel& model, std::span<const int> history);
double asn_density(const IidModel& model, const CountState& state);

/// Density of one ASN component (before weighting).
double asn_component_density(const ProcessModel& model, int component, std::span<const int> history);
double asn_component_density(const IidModel& model, int component, const CountState& state);

/// The A one-symbol extensions of a state, in symbol order.
std::vector<std::pair<int, CountState>> successors(const CountState& state);
std::vector<std::pair<int, History>> successors(const History& history, const Alphabet& alphabet);

/// All count vectors with total n, lexicographically descending
/// ((n,0,..,0) first). There are C(n+A-1, A-1) of them.
std::vector<CountState> count_states_at_stage(const Alphabet& alphabet, int n);
/// All A^n histories in base-A order.
std::vector<History> histories_at_stage(const Alphabet& alphabet, int n);
/// States of the model's natural kind at stage n, as labels.
std::vector<StateLabel> states_at_stage(const ProcessModel& model, int n);

/// Number of histories summarised by a count state: n! / prod_a c_a!.
double multiplicity(const CountState& state);

CountState counts_of(std::span<const int> history, int alphabet_size);

/// Encodes a history as a digit string ("010"); alphabet must be <= 10 for
/// single-digit symbols, larger alphabets use '.'-separated numbers.
std::string encode_history(std::span<const int> history, int alphabet_size);
History decode_history(const std::string& text, int alphabet_size);

} // namespace seqopt
