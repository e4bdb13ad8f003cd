#include "planted.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>

namespace pixie::testing {

namespace {

std::string predicate_name(std::size_t r)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "p%02zu", r);
    return buf;
}

std::size_t sample_index(const std::vector<double>& probabilities, std::mt19937_64& rng)
{
    std::discrete_distribution<std::size_t> pick(probabilities.begin(), probabilities.end());
    return pick(rng);
}

PredicateId sample_predicate(const Pixie& x, const LexicalModel& lex, std::mt19937_64& rng)
{
    std::vector<double> t;
    for (PredicateId r = 0; r < lex.predicate_count(); ++r)
        t.push_back(truth_prob(x, r, lex));
    return static_cast<PredicateId>(sample_index(t, rng));
}

}  // namespace

PlantedModel make_planted_model(const PlantedSpec& spec, std::mt19937_64& rng)
{
    PlantedModel m;
    for (std::size_t r = 0; r < spec.vocab; ++r)
        m.vocabulary.add_predicate(predicate_name(r), 0);
    const auto arg1 = m.vocabulary.add_label("ARG1");
    const auto arg2 = m.vocabulary.add_label("ARG2");

    m.world = WorldModel::zeros(spec.dim, spec.cardinality, 2);
    for (auto& w : m.world.weights) {
        std::vector<std::size_t> perm(spec.dim);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t i = 0; i < spec.dim; ++i)
            w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i])) = spec.coupling;
    }

    const auto subsets = enumerate_pixies(spec.dim, spec.signature_units);
    if (subsets.size() < spec.vocab)
        throw std::invalid_argument("not enough distinct signatures for the vocabulary");
    std::vector<std::size_t> order(subsets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    m.lexical = LexicalModel::zeros(spec.vocab, spec.dim);
    for (std::size_t r = 0; r < spec.vocab; ++r) {
        m.lexical.weights.row(static_cast<Eigen::Index>(r)).setConstant(-spec.signature_weight);
        for (auto i : subsets[order[r]].active)
            m.lexical.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
                spec.signature_weight;
    }

    m.topology = {3, {{1, arg1, 0}, {1, arg2, 2}}};
    m.prior = exact_prior(m.topology, m.world);
    return m;
}

DependencyGraph sample_graph(const PlantedModel& model, std::mt19937_64& rng)
{
    return sample_corpus(model, 1, rng).front();
}

std::vector<DependencyGraph> sample_corpus(const PlantedModel& model, std::size_t count,
                                           std::mt19937_64& rng)
{
    std::discrete_distribution<std::size_t> pick(model.prior.probabilities.begin(),
                                                 model.prior.probabilities.end());
    std::vector<DependencyGraph> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        const auto assignment = model.prior.assignment(pick(rng));
        DependencyGraph g;
        g.edges = model.topology.edges;
        for (auto k : assignment)
            g.nodes.emplace_back(sample_predicate(model.prior.pixies[k], model.lexical, rng));
        out.push_back(std::move(g));
    }
    return out;
}

Vocabulary corpus_vocabulary(const PlantedModel& model, std::span<const DependencyGraph> graphs)
{
    std::vector<std::uint64_t> counts(model.vocabulary.predicate_count(), 0);
    for (const auto& g : graphs)
        for (const auto& n : g.nodes)
            if (n)
                ++counts[*n];
    Vocabulary vocab;
    for (std::size_t r = 0; r < counts.size(); ++r)
        vocab.add_predicate(model.vocabulary.predicate_name(static_cast<PredicateId>(r)),
                            counts[r]);
    for (const auto& l : model.vocabulary.labels())
        vocab.add_label(l);
    return vocab;
}

RankingBenchmark planted_ranking_benchmark(const PlantedModel& model, std::size_t terms,
                                           std::size_t per_term, std::mt19937_64& rng)
{
    const auto pool = sample_corpus(model, 4000, rng);
    std::map<PredicateId, std::vector<std::pair<const DependencyGraph*, Role>>> slots;
    for (const auto& g : pool) {
        slots[*g.nodes[0]].emplace_back(&g, Role::Subject);
        slots[*g.nodes[2]].emplace_back(&g, Role::Object);
    }
    std::vector<PredicateId> candidates;
    for (const auto& [r, uses] : slots)
        if (uses.size() >= per_term)
            candidates.push_back(r);
    if (candidates.size() < terms)
        throw std::runtime_error("too few predicates fill argument slots often enough");
    std::shuffle(candidates.begin(), candidates.end(), rng);
    candidates.resize(terms);
    std::sort(candidates.begin(), candidates.end());

    RankingBenchmark bench;
    const auto& vocab = model.vocabulary;
    for (auto t : candidates) {
        const auto& term = vocab.predicate_name(t);
        bench.terms.push_back(term);
        auto uses = slots[t];
        std::shuffle(uses.begin(), uses.end(), rng);
        for (std::size_t k = 0; k < per_term; ++k) {
            const auto& [g, role] = uses[k];
            const auto other = role == Role::Subject ? *g->nodes[2] : *g->nodes[0];
            bench.properties.push_back({term, role, std::string(kMaskedLexeme),
                                        vocab.predicate_name(*g->nodes[1]),
                                        vocab.predicate_name(other)});
        }
    }
    return bench;
}

}  // namespace pixie::testing
