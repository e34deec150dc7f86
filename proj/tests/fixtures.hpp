#pragma once

#include "seqopt/model.hpp"
#include "seqopt/risk.hpp"

#include <string>
#include <vector>

namespace seqopt::testing {

struct Fixture {
    std::string name;
    ProcessModel model;
    LagrangeWeights weights;
};

inline IidModel bernoulli(std::vector<Pmf> pmfs, std::vector<AsnComponent> asn) {
    const int k = static_cast<int>(pmfs.size());
    return IidModel(Alphabet(2), HypothesisSet::numbered(k), std::move(pmfs), std::move(asn));
}

/// p1 = (0.7, 0.3), p2 = (0.3, 0.7), ASN at the midpoint (0.5, 0.5).
inline IidModel main_bernoulli_model() { return bernoulli({{0.7, 0.3}, {0.3, 0.7}}, {{{0.5, 0.5}, 1.0}}); }

inline Fixture main_bernoulli(double lambda = 100.0) {
    return {"bernoulli_0.7_0.3", main_bernoulli_model(), LagrangeWeights::uniform(2, lambda)};
}

inline Fixture asymmetric_bernoulli() {
    return {"asymmetric_lambda", bernoulli({{0.8, 0.2}, {0.4, 0.6}}, {{{0.8, 0.2}, 1.0}}),
            LagrangeWeights::general({{0, 50}, {20, 0}})};
}

inline Fixture three_bernoulli() {
    return {"three_hypotheses", bernoulli({{0.2, 0.8}, {0.5, 0.5}, {0.8, 0.2}}, {{{0.5, 0.5}, 1.0}}),
            LagrangeWeights::uniform(3, 30.0)};
}

inline Fixture three_bernoulli_mixture() {
    return {"three_hypotheses_mixture_asn",
            bernoulli({{0.25, 0.75}, {0.55, 0.45}, {0.9, 0.1}}, {{{0.35, 0.65}, 0.6}, {{0.65, 0.35}, 0.4}}),
            LagrangeWeights::general({{0, 37.5, 12}, {55, 0, 20.25}, {8, 41, 0}})};
}

inline Fixture three_bernoulli_gross() {
    return {"three_hypotheses_gross", bernoulli({{0.3, 0.7}, {0.5, 0.5}, {0.75, 0.25}}, {{{0.5, 0.5}, 1.0}}),
            LagrangeWeights::row_constant({10, 40, 25})};
}

inline Fixture identical_bernoulli() {
    return {"identical_hypotheses", bernoulli({{0.4, 0.6}, {0.4, 0.6}}, {{{0.4, 0.6}, 1.0}}),
            LagrangeWeights::uniform(2, 10.0)};
}

inline Fixture degenerate_bernoulli() {
    return {"degenerate_pmf", bernoulli({{1.0, 0.0}, {0.5, 0.5}}, {{{0.5, 0.5}, 1.0}}), LagrangeWeights::uniform(2, 20.0)};
}

/// Two-state Markov chains given as joint tables up to `horizon`.
inline Fixture markov_chain(int horizon = 6) {
    struct Chain {
        double initial[2];
        double transition[2][2];
    };
    const Chain chains[2] = {{{0.5, 0.5}, {{0.8, 0.2}, {0.3, 0.7}}}, {{0.5, 0.5}, {{0.4, 0.6}, {0.6, 0.4}}}};
    std::vector<JointTables> tables(2);
    for (int i = 0; i < 2; ++i) {
        const auto& c = chains[i];
        std::vector<double> previous = {c.initial[0], c.initial[1]};
        tables[static_cast<std::size_t>(i)].by_length.push_back(previous);
        for (int n = 2; n <= horizon; ++n) {
            std::vector<double> next(previous.size() * 2);
            for (std::size_t h = 0; h < previous.size(); ++h) {
                const int last = static_cast<int>(h % 2);
                for (int a = 0; a < 2; ++a) next[h * 2 + static_cast<std::size_t>(a)] = previous[h] * c.transition[last][a];
            }
            tables[static_cast<std::size_t>(i)].by_length.push_back(next);
            previous = std::move(next);
        }
    }
    std::vector<AsnJointComponent> asn = {{tables[0], 0.5}, {tables[1], 0.5}};
    return {"markov_chain", JointTableModel(Alphabet(2), HypothesisSet::numbered(2), tables, asn),
            LagrangeWeights::uniform(2, 50.0)};
}

inline Fixture ternary() {
    return {"ternary_alphabet",
            IidModel(Alphabet(3), HypothesisSet::numbered(3), {{0.5, 0.3, 0.2}, {0.2, 0.5, 0.3}, {0.3, 0.2, 0.5}},
                     {{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0}}),
            LagrangeWeights::uniform(3, 25.0)};
}

/// Two-symbol i.i.d. fixtures with k in {2, 3}.
inline std::vector<Fixture> binary_iid_fixtures() {
    return {main_bernoulli(),      asymmetric_bernoulli(), three_bernoulli(),     three_bernoulli_mixture(),
            three_bernoulli_gross(), identical_bernoulli(), degenerate_bernoulli()};
}

inline std::vector<Fixture> all_fixtures() {
    auto out = binary_iid_fixtures();
    out.push_back(markov_chain());
    out.push_back(ternary());
    return out;
}

} // namespace seqopt::testing
