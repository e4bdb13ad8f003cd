#pragma once

// Tab-separated benchmark files.
//
// Ranking rows (relative-clause composition):
//     term  role  headnoun  verb  argnoun
// where role is SBJ when the head noun fills the verb's ARG1 slot and OBJ
// when it fills ARG2. A head noun written as "*" is left MASKED.
//
// Similarity rows (verbs in context):
//     verb1  subject  object  verb2  score  annotator
//
// Lexemes are mapped to predicate names through an optional lexicon (two
// columns: lexeme, predicate); unmapped lexemes are looked up verbatim.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pixie/graph.hpp"

namespace pixie {

enum class Role { Subject, Object };

std::string_view to_string(Role role);

struct RankingProperty {
    std::string term;
    Role role = Role::Subject;
    std::string head_noun;
    std::string verb;
    std::string arg_noun;
};

struct RankingBenchmark {
    std::vector<std::string> terms;  // distinct, in first-seen order
    std::vector<RankingProperty> properties;
};

struct SimilarityJudgement {
    std::string verb1;
    std::string subject;
    std::string object;
    std::string verb2;
    double score = 0.0;
    std::string annotator;
};

struct SimilarityBenchmark {
    std::vector<SimilarityJudgement> judgements;
};

inline constexpr std::string_view kMaskedLexeme = "*";

class Lexicon {
public:
    Lexicon() = default;

    static Lexicon load(std::istream& in);

    void add(std::string lexeme, std::string predicate);
    std::string_view predicate_name(std::string_view lexeme) const;

    // nullopt: out of vocabulary. The masked lexeme resolves to kMasked.
    std::optional<NodePredicate> resolve(std::string_view lexeme, const Vocabulary& vocab) const;

private:
    std::unordered_map<std::string, std::string> map_;
};

RankingBenchmark load_ranking_benchmark(std::istream& in);
SimilarityBenchmark load_similarity_benchmark(std::istream& in);

// Lexemes of the benchmark that do not resolve, each reported once.
std::vector<std::string> out_of_vocabulary(const RankingBenchmark& bench, const Vocabulary& vocab,
                                           const Lexicon& lexicon);
std::vector<std::string> out_of_vocabulary(const SimilarityBenchmark& bench,
                                           const Vocabulary& vocab, const Lexicon& lexicon);

}  // namespace pixie
