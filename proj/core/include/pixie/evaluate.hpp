#pragma once

// Logical inference over a trained model and the two benchmark protocols:
// relative-clause property ranking (MAP) and verb similarity in context
// (Spearman correlation).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pixie/benchmark_data.hpp"
#include "pixie/model.hpp"

namespace pixie {

// Encodes the graph without dropout and applies predicate `a` to the target
// node's mean-field pixie. Throws std::out_of_range for an unknown node or
// predicate.
double infer_truth(const DependencyGraph& graph, NodeId target, PredicateId a,
                   const ModelStack& model);

// Three nodes [subject, verb, object] with verb -ARG1-> subject and
// verb -ARG2-> object. Throws DataError if either label is missing.
DependencyGraph svo_graph(NodePredicate subject, PredicateId verb, NodePredicate object,
                          const Vocabulary& vocab);

inline constexpr NodeId kSubjectNode = 0;
inline constexpr NodeId kVerbNode = 1;
inline constexpr NodeId kObjectNode = 2;

// Textbook AP over relevance flags in rank order. Throws
// std::invalid_argument when empty or without a relevant item.
double average_precision(const std::vector<bool>& ranked_relevance);

// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> xs);

struct SpearmanResult {
    double rho = 0.0;
    bool degenerate = false;  // a constant input; rho is reported as 0
};

// Pearson correlation of average ranks. Throws std::invalid_argument on
// empty or mismatched inputs.
SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys);

struct RankedCandidate {
    std::size_t item = 0;  // index into the scored list
    double score = 0.0;
    bool relevant = false;
};

struct RankedResult {
    std::string query;
    std::vector<RankedCandidate> ranking;  // scores non-increasing
    double average_precision = 0.0;
    std::vector<std::size_t> confounder_ranks;  // 1-based

    std::optional<double> confounder_mean_rank() const;
};

// Orders items by descending score; ties keep input order.
RankedResult rank_items(std::string query, std::span<const double> scores,
                        const std::vector<bool>& relevant);

struct RankingReport {
    double map = 0.0;
    std::vector<RankedResult> terms;
    std::size_t properties_scored = 0;
    std::size_t skipped_properties = 0;  // a lexeme out of vocabulary
    std::size_t skipped_terms = 0;       // out of vocabulary or no relevant property left
    std::vector<std::string> out_of_vocabulary;

    nlohmann::json to_json() const;
};

// Ranks every usable property for every term by applying the term to the
// property's head-noun node. A property is relevant to its own term and a
// confounder for any other term that appears among its lexemes.
RankingReport score_ranking(const RankingBenchmark& bench, const ModelStack& model,
                            const Lexicon& lexicon = {});

// Mean over `trials` random permutations of the MAP obtained for the given
// per-query relevance lists.
double random_baseline_map(std::span<const std::vector<bool>> relevance, std::size_t trials,
                           std::mt19937_64& rng);
// The relevance lists of a report, in the order they were scored.
std::vector<std::vector<bool>> relevance_lists(const RankingReport& report);

enum class SimilarityMode { OneDirection, BothDirections };

std::string_view to_string(SimilarityMode mode);

struct ScoredJudgement {
    std::size_t index = 0;  // row in the benchmark
    double model_score = 0.0;
    double judgement = 0.0;
};

struct SimilarityReport {
    SimilarityMode mode = SimilarityMode::OneDirection;
    SpearmanResult separate;  // every judgement on its own
    SpearmanResult averaged;  // judgements averaged per distinct pair
    std::vector<ScoredJudgement> items;
    std::size_t distinct_pairs = 0;
    std::size_t skipped = 0;
    std::vector<std::string> out_of_vocabulary;

    nlohmann::json to_json() const;
};

SimilarityReport score_similarity(const SimilarityBenchmark& bench, SimilarityMode mode,
                                  const ModelStack& model, const Lexicon& lexicon = {});

}  // namespace pixie
