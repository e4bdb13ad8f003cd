#pragma once

// Synthetic subject-verb-object corpora drawn from a planted generative model.
//
// Each predicate is true of pixies that contain its signature units;
// each label couples a verb unit to one argument unit through a fixed
// permutation. Situations are drawn exactly from the prior over the
// three-node topology and predicates from the generation distribution.

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "pixie/benchmark_data.hpp"
#include "pixie/model.hpp"

namespace pixie::testing {

struct PlantedSpec {
    std::size_t dim = 8;
    std::size_t cardinality = 3;
    std::size_t vocab = 20;
    std::size_t signature_units = 2;
    double coupling = 8.0;
    double signature_weight = 7.0;
};

struct PlantedModel {
    Vocabulary vocabulary;  // predicates p00.., labels ARG1 and ARG2
    WorldModel world;
    LexicalModel lexical;
    SituationDistribution prior;  // over the subject-verb-object topology
    GraphTopology topology;
};

PlantedModel make_planted_model(const PlantedSpec& spec, std::mt19937_64& rng);

// A graph with nodes [subject, verb, object].
DependencyGraph sample_graph(const PlantedModel& model, std::mt19937_64& rng);

std::vector<DependencyGraph> sample_corpus(const PlantedModel& model, std::size_t count,
                                           std::mt19937_64& rng);

// Vocabulary with frequencies counted over `graphs`, in the planted order.
Vocabulary corpus_vocabulary(const PlantedModel& model, std::span<const DependencyGraph> graphs);

// `terms` distinct predicates, each with `per_term` properties whose head
// noun is hidden ("*") and whose verb and other argument come from a
// sampled graph in which the term filled the head-noun slot.
RankingBenchmark planted_ranking_benchmark(const PlantedModel& model, std::size_t terms,
                                           std::size_t per_term, std::mt19937_64& rng);

}  // namespace pixie::testing
