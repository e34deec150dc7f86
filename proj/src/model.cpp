#include "seqopt/model.hpp"

#include "seqopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace seqopt {

namespace {

constexpr double kPmfTolerance = 1e-12;

void validate_pmf(const Pmf& pmf, int alphabet_size, const std::string& what) {
    if (static_cast<int>(pmf.size()) != alphabet_size) {
        throw ValidationError(what + ": expected " + std::to_string(alphabet_size) +
                              " probabilities, got " + std::to_string(pmf.size()));
    }
    double total = 0.0;
    for (double p : pmf) {
        if (!std::isfinite(p) || p < 0.0) throw ValidationError(what + ": negative or non-finite probability");
        total += p;
    }
    if (std::abs(total - 1.0) > kPmfTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << ": probabilities sum to " << total << ", not 1";
        throw ValidationError(msg.str());
    }
}

void validate_weights(const std::vector<double>& weights) {
    if (weights.empty()) throw ValidationError("ASN weight mixture must have at least one component");
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw ValidationError("ASN mixture weight must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > kPmfTolerance) throw ValidationError("ASN mixture weights must sum to 1");
}

std::size_t ipow(std::size_t base, int exponent) {
    std::size_t r = 1;
    for (int i = 0; i < exponent; ++i) r *= base;
    return r;
}

std::size_t history_index(std::span<const int> history, int alphabet_size) {
    std::size_t index = 0;
    for (int symbol : history) index = index * static_cast<std::size_t>(alphabet_size) + static_cast<std::size_t>(symbol);
    return index;
}

void check_history(std::span<const int> history, const Alphabet& alphabet) {
    for (int symbol : history) {
        if (!alphabet.contains(symbol)) {
            throw ValidationError("history symbol " + std::to_string(symbol) + " outside alphabet of size " +
                                  std::to_string(alphabet.size()));
        }
    }
}

void check_counts(const CountState& state, const Alphabet& alphabet) {
    if (static_cast<int>(state.counts.size()) != alphabet.size()) {
        throw ValidationError("count state has wrong alphabet size");
    }
    int total = 0;
    for (int c : state.counts) {
        if (c < 0) throw ValidationError("count state has a negative count");
        total += c;
    }
    if (total != state.n) throw ValidationError("count state counts do not sum to its stage");
}

double power_product(const Pmf& pmf, const std::vector<int>& counts) {
    double density = 1.0;
    for (std::size_t a = 0; a < counts.size(); ++a) {
        if (counts[a] > 0) density *= std::pow(pmf[a], counts[a]);
    }
    return density;
}

void validate_tables(const JointTables& tables, int alphabet_size, int horizon, const std::string& what) {
    if (static_cast<int>(tables.by_length.size()) != horizon) {
        throw ValidationError(what + ": table horizon mismatch");
    }
    for (int n = 1; n <= horizon; ++n) {
        const auto& table = tables.by_length[n - 1];
        if (table.size() != ipow(static_cast<std::size_t>(alphabet_size), n)) {
            throw ValidationError(what + ": length-" + std::to_string(n) + " table has wrong size");
        }
        double total = 0.0;
        for (double p : table) {
            if (!std::isfinite(p) || p < 0.0) throw ValidationError(what + ": negative or non-finite mass");
            total += p;
        }
        if (std::abs(total - 1.0) > kPmfTolerance) {
            throw ValidationError(what + ": length-" + std::to_string(n) + " table does not sum to 1");
        }
        if (n > 1) {
            const auto& shorter = tables.by_length[n - 2];
            for (std::size_t h = 0; h < shorter.size(); ++h) {
                double marginal = 0.0;
                for (int a = 0; a < alphabet_size; ++a) marginal += table[h * alphabet_size + a];
                if (std::abs(marginal - shorter[h]) > kPmfTolerance) {
                    throw ValidationError(what + ": length-" + std::to_string(n) +
                                          " table does not marginalise to the length-" + std::to_string(n - 1) +
                                          " table");
                }
            }
        }
    }
}

double table_min_positive(const JointTables& tables) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : tables.by_length)
        for (double p : t)
            if (p > 0.0) m = std::min(m, p);
    return m;
}

} // namespace

Alphabet::Alphabet(int size) : size_(size) {
    if (size < 2) throw ValidationError("alphabet must have at least 2 symbols");
}

HypothesisSet::HypothesisSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw ValidationError("at least two hypotheses are required");
    if (labels_.size() > 32) throw ValidationError("at most 32 hypotheses are supported");
    std::set<std::string> unique(labels_.begin(), labels_.end());
    if (unique.size() != labels_.size()) throw ValidationError("hypothesis labels must be pairwise distinct");
}

HypothesisSet HypothesisSet::numbered(int k) {
    std::vector<std::string> labels;
    for (int i = 1; i <= k; ++i) labels.push_back("H" + std::to_string(i));
    return HypothesisSet(std::move(labels));
}

const std::string& HypothesisSet::label(int index) const {
    if (index < 0 || index >= size()) throw ValidationError("unknown hypothesis index " + std::to_string(index));
    return labels_[static_cast<std::size_t>(index)];
}

CountState CountState::root(int alphabet_size) {
    return CountState{0, std::vector<int>(static_cast<std::size_t>(alphabet_size), 0)};
}

IidModel::IidModel(Alphabet alphabet, HypothesisSet hypotheses, std::vector<Pmf> pmfs,
                   std::vector<AsnComponent> asn_weights)
    : alphabet_(alphabet), hypotheses_(std::move(hypotheses)), pmfs_(std::move(pmfs)),
      asn_weights_(std::move(asn_weights)) {
    if (static_cast<int>(pmfs_.size()) != hypotheses_.size()) {
        throw ValidationError("number of pmfs does not match number of hypotheses");
    }
    for (std::size_t i = 0; i < pmfs_.size(); ++i) {
        validate_pmf(pmfs_[i], alphabet_.size(), "hypothesis " + std::to_string(i + 1));
    }
    std::vector<double> weights;
    for (std::size_t e = 0; e < asn_weights_.size(); ++e) {
        validate_pmf(asn_weights_[e].pmf, alphabet_.size(), "ASN component " + std::to_string(e + 1));
        weights.push_back(asn_weights_[e].weight);
    }
    validate_weights(weights);
}

const Pmf& IidModel::pmf(int hypothesis) const {
    if (hypothesis < 0 || hypothesis >= num_hypotheses()) {
        throw ValidationError("unknown hypothesis index " + std::to_string(hypothesis));
    }
    return pmfs_[static_cast<std::size_t>(hypothesis)];
}

double IidModel::min_positive_probability() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& pmf : pmfs_)
        for (double p : pmf)
            if (p > 0.0) m = std::min(m, p);
    for (const auto& c : asn_weights_)
        for (double p : c.pmf)
            if (p > 0.0) m = std::min(m, p);
    return m;
}

JointTableModel::JointTableModel(Alphabet alphabet, HypothesisSet hypotheses, std::vector<JointTables> tables,
                                 std::vector<AsnJointComponent> asn_tables)
    : alphabet_(alphabet), hypotheses_(std::move(hypotheses)), tables_(std::move(tables)),
      asn_tables_(std::move(asn_tables)) {
    if (static_cast<int>(tables_.size()) != hypotheses_.size()) {
        throw ValidationError("number of joint tables does not match number of hypotheses");
    }
    horizon_ = static_cast<int>(tables_.front().by_length.size());
    if (horizon_ < 1) throw ValidationError("joint tables must cover at least one stage");
    for (std::size_t i = 0; i < tables_.size(); ++i) {
        validate_tables(tables_[i], alphabet_.size(), horizon_, "hypothesis " + std::to_string(i + 1));
    }
    std::vector<double> weights;
    for (std::size_t e = 0; e < asn_tables_.size(); ++e) {
        validate_tables(asn_tables_[e].tables, alphabet_.size(), horizon_, "ASN component " + std::to_string(e + 1));
        weights.push_back(asn_tables_[e].weight);
    }
    validate_weights(weights);
}

const JointTables& JointTableModel::tables(int hypothesis) const {
    if (hypothesis < 0 || hypothesis >= num_hypotheses()) {
        throw ValidationError("unknown hypothesis index " + std::to_string(hypothesis));
    }
    return tables_[static_cast<std::size_t>(hypothesis)];
}

double JointTableModel::mass(const JointTables& tables, std::span<const int> history) const {
    if (history.empty()) return 1.0;
    if (static_cast<int>(history.size()) > horizon_) {
        throw ValidationError("history of length " + std::to_string(history.size()) + " exceeds table horizon " +
                              std::to_string(horizon_));
    }
    check_history(history, alphabet_);
    return tables.by_length[history.size() - 1][history_index(history, alphabet_.size())];
}

double JointTableModel::min_positive_probability() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : tables_) m = std::min(m, table_min_positive(t));
    for (const auto& c : asn_tables_) m = std::min(m, table_min_positive(c.tables));
    return m;
}

const Alphabet& alphabet_of(const ProcessModel& model) {
    return std::visit([](const auto& m) -> const Alphabet& { return m.alphabet(); }, model);
}

const HypothesisSet& hypotheses_of(const ProcessModel& model) {
    return std::visit([](const auto& m) -> const HypothesisSet& { return m.hypotheses(); }, model);
}

int num_hypotheses(const ProcessModel& model) { return hypotheses_of(model).size(); }

int num_asn_components(const ProcessModel& model) {
    if (const auto* iid = std::get_if<IidModel>(&model)) return static_cast<int>(iid->asn_weights().size());
    return static_cast<int>(std::get<JointTableModel>(model).asn_tables().size());
}

double asn_component_weight(const ProcessModel& model, int component) {
    if (component < 0 || component >= num_asn_components(model)) throw ValidationError("unknown ASN component");
    if (const auto* iid = std::get_if<IidModel>(&model)) return iid->asn_weights()[component].weight;
    return std::get<JointTableModel>(model).asn_tables()[component].weight;
}

StateKind natural_state_kind(const ProcessModel& model) {
    return std::holds_alternative<IidModel>(model) ? StateKind::counts : StateKind::histories;
}

int max_horizon(const ProcessModel& model) {
    if (const auto* joint = std::get_if<JointTableModel>(&model)) return joint->horizon();
    return -1;
}

double joint_density(const IidModel& model, int hypothesis, const CountState& state) {
    const Pmf& pmf = model.pmf(hypothesis);
    check_counts(state, model.alphabet());
    return power_product(pmf, state.counts);
}

double joint_density(const ProcessModel& model, int hypothesis, std::span<const int> history) {
    if (const auto* iid = std::get_if<IidModel>(&model)) {
        check_history(history, iid->alphabet());
        return joint_density(*iid, hypothesis, counts_of(history, iid->alphabet().size()));
    }
    const auto& joint = std::get<JointTableModel>(model);
    return joint.mass(joint.tables(hypothesis), history);
}

double asn_component_density(const IidModel& model, int component, const CountState& state) {
    if (component < 0 || component >= static_cast<int>(model.asn_weights().size())) {
        throw ValidationError("unknown ASN component");
    }
    check_counts(state, model.alphabet());
    return power_product(model.asn_weights()[component].pmf, state.counts);
}

double asn_component_density(const ProcessModel& model, int component, std::span<const int> history) {
    if (const auto* iid = std::get_if<IidModel>(&model)) {
        check_history(history, iid->alphabet());
        return asn_component_density(*iid, component, counts_of(history, iid->alphabet().size()));
    }
    const auto& joint = std::get<JointTableModel>(model);
    if (component < 0 || component >= static_cast<int>(joint.asn_tables().size())) {
        throw ValidationError("unknown ASN component");
    }
    return joint.mass(joint.asn_tables()[component].tables, history);
}

double asn_density(const IidModel& model, const CountState& state) {
    double total = 0.0;
    for (std::size_t e = 0; e < model.asn_weights().size(); ++e) {
        total += model.asn_weights()[e].weight * asn_component_density(model, static_cast<int>(e), state);
    }
    return total;
}

double asn_density(const ProcessModel& model, std::span<const int> history) {
    double total = 0.0;
    const int components = num_asn_components(model);
    for (int e = 0; e < components; ++e) {
        total += asn_component_weight(model, e) * asn_component_density(model, e, history);
    }
    return total;
}

std::vector<std::pair<int, CountState>> successors(const CountState& state) {
    std::vector<std::pair<int, CountState>> out;
    out.reserve(state.counts.size());
    for (std::size_t a = 0; a < state.counts.size(); ++a) {
        CountState next = state;
        next.n += 1;
        next.counts[a] += 1;
        out.emplace_back(static_cast<int>(a), std::move(next));
    }
    return out;
}

std::vector<std::pair<int, History>> successors(const History& history, const Alphabet& alphabet) {
    std::vector<std::pair<int, History>> out;
    out.reserve(static_cast<std::size_t>(alphabet.size()));
    for (int a = 0; a < alphabet.size(); ++a) {
        History next = history;
        next.push_back(a);
        out.emplace_back(a, std::move(next));
    }
    return out;
}

namespace {

void enumerate_compositions(int remaining, std::size_t position, std::vector<int>& current,
                            std::vector<CountState>& out, int n) {
    if (position + 1 == current.size()) {
        current[position] = remaining;
        out.push_back(CountState{n, current});
        return;
    }
    for (int c = remaining; c >= 0; --c) {
        current[position] = c;
        enumerate_compositions(remaining - c, position + 1, current, out, n);
    }
}

} // namespace

std::vector<CountState> count_states_at_stage(const Alphabet& alphabet, int n) {
    if (n < 0) throw ValidationError("stage must be nonnegative");
    std::vector<CountState> out;
    std::vector<int> current(static_cast<std::size_t>(alphabet.size()), 0);
    enumerate_compositions(n, 0, current, out, n);
    return out;
}

std::vector<History> histories_at_stage(const Alphabet& alphabet, int n) {
    if (n < 0) throw ValidationError("stage must be nonnegative");
    const std::size_t total = ipow(static_cast<std::size_t>(alphabet.size()), n);
    std::vector<History> out;
    out.reserve(total);
    for (std::size_t index = 0; index < total; ++index) {
        History h(static_cast<std::size_t>(n));
        std::size_t rest = index;
        for (int t = n - 1; t >= 0; --t) {
            h[static_cast<std::size_t>(t)] = static_cast<int>(rest % static_cast<std::size_t>(alphabet.size()));
            rest /= static_cast<std::size_t>(alphabet.size());
        }
        out.push_back(std::move(h));
    }
    return out;
}

std::vector<StateLabel> states_at_stage(const ProcessModel& model, int n) {
    if (const auto* joint = std::get_if<JointTableModel>(&model)) {
        if (n > joint->horizon()) {
            throw ValidationError("stage " + std::to_string(n) + " exceeds table horizon " +
                                  std::to_string(joint->horizon()));
        }
        return histories_at_stage(joint->alphabet(), n);
    }
    std::vector<StateLabel> out;
    for (auto& s : count_states_at_stage(alphabet_of(model), n)) out.push_back(std::move(s.counts));
    return out;
}

namespace {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r < 1e15 ? std::round(r) : r;
}

} // namespace

double multiplicity(const CountState& state) {
    double result = 1.0;
    int remaining = state.n;
    for (int c : state.counts) {
        result *= binomial(remaining, c);
        remaining -= c;
    }
    return result;
}

CountState counts_of(std::span<const int> history, int alphabet_size) {
    CountState state = CountState::root(alphabet_size);
    for (int symbol : history) {
        if (symbol < 0 || symbol >= alphabet_size) throw ValidationError("history symbol outside alphabet");
        state.counts[static_cast<std::size_t>(symbol)] += 1;
        state.n += 1;
    }
    return state;
}

std::string encode_history(std::span<const int> history, int alphabet_size) {
    std::string out;
    for (std::size_t t = 0; t < history.size(); ++t) {
        if (alphabet_size <= 10) {
            out.push_back(static_cast<char>('0' + history[t]));
        } else {
            if (t > 0) out.push_back('.');
            out += std::to_string(history[t]);
        }
    }
    return out;
}

History decode_history(const std::string& text, int alphabet_size) {
    History out;
    if (text.empty()) return out;
    if (alphabet_size <= 10) {
        for (char ch : text) {
            if (ch < '0' || ch > '9') throw ValidationError("history '" + text + "' is not a digit string");
            out.push_back(ch - '0');
        }
    } else {
        std::stringstream in(text);
        std::string part;
        while (std::getline(in, part, '.')) {
            if (part.empty()) throw ValidationError("history '" + text + "' has an empty symbol");
            out.push_back(std::stoi(part));
        }
    }
    for (int symbol : out) {
        if (symbol < 0 || symbol >= alphabet_size) {
            throw ValidationError("history '" + text + "' has a symbol outside the alphabet");
        }
    }
    return out;
}

} // namespace seqopt
