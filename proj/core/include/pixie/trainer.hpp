#pragma once

// Joint training: the encoder minimises its objective on masked graphs while
// the world and lexical models ascend the approximate log-likelihood, using
// the unmasked encoder output as the posterior and its belief-propagation
// refinement as the prior.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pixie/belief_propagation.hpp"
#include "pixie/model.hpp"
#include "pixie/objective.hpp"
#include "pixie/optimiser.hpp"

namespace pixie {

struct GroupRates {
    double learning_rate = 1e-3;
    double l2 = 0.0;

    friend bool operator==(const GroupRates&, const GroupRates&) = default;
};

struct TrainConfig {
    GroupRates world;
    GroupRates lexical;
    GroupRates encoder;
    double beta = 5.0;
    double alpha = 1.0;
    std::size_t negatives = 20;
    bool uniform_negatives = false;
    double dropout_rate = 0.2;
    std::size_t bp_iterations = 5;
    double bp_damping = 0.5;
    std::size_t batch_size = 32;
    std::size_t epochs = 1;
    std::uint64_t seed = 0;
    std::size_t enumeration_budget = kDefaultEnumerationBudget;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;

    ObjectiveWeights objective_weights() const { return {beta, alpha}; }
    BpOptions bp_options() const { return {bp_iterations, bp_damping}; }

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct OptimiserStates {
    AdamState world;
    AdamState lexical;
    AdamState encoder;

    friend bool operator==(const OptimiserStates&, const OptimiserStates&) = default;
};

struct EpochMetrics {
    std::size_t epoch = 0;
    std::size_t graphs = 0;
    std::size_t batches = 0;
    // Per-graph means of the encoder objective and its terms.
    double objective = 0.0;
    double energy = 0.0;
    double generation = 0.0;
    double truth = 0.0;
    double entropy = 0.0;
    // Per-batch means of the averaged gradient norms.
    double grad_norm_world = 0.0;
    double grad_norm_lexical = 0.0;
    double grad_norm_encoder = 0.0;
    double wall_seconds = 0.0;

    // JSON record; `include_time` false drops the only nondeterministic field.
    nlohmann::json to_json(bool include_time = true) const;
};

// Draws predicate ids with replacement, proportional to corpus frequency or
// uniformly.
class NegativeSampler {
public:
    explicit NegativeSampler(const Vocabulary& vocab, bool uniform = false);

    std::vector<PredicateId> draw(std::size_t n, std::mt19937_64& rng) const;

private:
    std::size_t size_ = 0;
    bool uniform_ = false;
    mutable std::discrete_distribution<PredicateId> weighted_;
};

std::vector<PredicateId> negative_sample(const Vocabulary& vocab, std::size_t n,
                                         std::mt19937_64& rng, bool uniform = false);

// Independent generator for one epoch, so training can resume mid-run.
std::mt19937_64 epoch_rng(std::uint64_t seed, std::size_t epoch);

// One pass over `graphs` in shuffled order with one optimiser step per
// minibatch for each parameter group.
EpochMetrics train_epoch(std::span<const DependencyGraph> graphs, ModelStack& model,
                         OptimiserStates& states, const TrainConfig& config, std::mt19937_64& rng);

}  // namespace pixie
