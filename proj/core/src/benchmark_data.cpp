#include "pixie/benchmark_data.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

#include "pixie/errors.hpp"

namespace pixie {

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string field;
    while (ss >> field)
        fields.push_back(field);
    return fields;
}

bool blank(const std::string& line)
{
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::string row_error(std::size_t line_no, const std::string& what)
{
    return "benchmark line " + std::to_string(line_no) + ": " + what;
}

void collect(std::string_view lexeme, const Vocabulary& vocab, const Lexicon& lexicon,
             std::set<std::string>& seen, std::vector<std::string>& out)
{
    if (lexicon.resolve(lexeme, vocab))
        return;
    if (seen.emplace(lexeme).second)
        out.emplace_back(lexeme);
}

}  // namespace

std::string_view to_string(Role role)
{
    return role == Role::Subject ? "SBJ" : "OBJ";
}

Lexicon Lexicon::load(std::istream& in)
{
    Lexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line))
            continue;
        auto f = split_fields(line);
        if (f.size() != 2)
            throw DataError("lexicon line " + std::to_string(line_no)
                            + ": expected 'lexeme predicate'");
        lex.add(std::move(f[0]), std::move(f[1]));
    }
    return lex;
}

void Lexicon::add(std::string lexeme, std::string predicate)
{
    map_[std::move(lexeme)] = std::move(predicate);
}

std::string_view Lexicon::predicate_name(std::string_view lexeme) const
{
    auto it = map_.find(std::string(lexeme));
    return it == map_.end() ? lexeme : std::string_view(it->second);
}

std::optional<NodePredicate> Lexicon::resolve(std::string_view lexeme,
                                              const Vocabulary& vocab) const
{
    if (lexeme == kMaskedLexeme)
        return NodePredicate{kMasked};
    if (auto id = vocab.find_predicate(predicate_name(lexeme)))
        return NodePredicate{*id};
    return std::nullopt;
}

RankingBenchmark load_ranking_benchmark(std::istream& in)
{
    RankingBenchmark bench;
    std::set<std::string> seen_terms;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line))
            continue;
        auto f = split_fields(line);
        if (f.size() != 5)
            throw DataError(row_error(line_no, "ranking row needs 5 fields, got "
                                                   + std::to_string(f.size())));
        RankingProperty p;
        p.term = f[0];
        if (f[1] == "SBJ")
            p.role = Role::Subject;
        else if (f[1] == "OBJ")
            p.role = Role::Object;
        else
            throw DataError(row_error(line_no, "unknown role tag '" + f[1] + "'"));
        p.head_noun = f[2];
        p.verb = f[3];
        p.arg_noun = f[4];
        if (seen_terms.insert(p.term).second)
            bench.terms.push_back(p.term);
        bench.properties.push_back(std::move(p));
    }
    return bench;
}

SimilarityBenchmark load_similarity_benchmark(std::istream& in)
{
    SimilarityBenchmark bench;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line))
            continue;
        auto f = split_fields(line);
        if (f.size() != 6)
            throw DataError(row_error(line_no, "similarity row needs 6 fields, got "
                                                   + std::to_string(f.size())));
        SimilarityJudgement j;
        j.verb1 = f[0];
        j.subject = f[1];
        j.object = f[2];
        j.verb2 = f[3];
        const auto& s = f[4];
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), j.score);
        if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(j.score))
            throw DataError(row_error(line_no, "score '" + s + "' is not a number"));
        j.annotator = f[5];
        bench.judgements.push_back(std::move(j));
    }
    return bench;
}

std::vector<std::string> out_of_vocabulary(const RankingBenchmark& bench, const Vocabulary& vocab,
                                           const Lexicon& lexicon)
{
    std::set<std::string> seen;
    std::vector<std::string> out;
    for (const auto& t : bench.terms)
        collect(t, vocab, lexicon, seen, out);
    for (const auto& p : bench.properties) {
        collect(p.head_noun, vocab, lexicon, seen, out);
        collect(p.verb, vocab, lexicon, seen, out);
        collect(p.arg_noun, vocab, lexicon, seen, out);
    }
    return out;
}

std::vector<std::string> out_of_vocabulary(const SimilarityBenchmark& bench,
                                           const Vocabulary& vocab, const Lexicon& lexicon)
{
    std::set<std::string> seen;
    std::vector<std::string> out;
    for (const auto& j : bench.judgements) {
        collect(j.verb1, vocab, lexicon, seen, out);
        collect(j.subject, vocab, lexicon, seen, out);
        collect(j.object, vocab, lexicon, seen, out);
        collect(j.verb2, vocab, lexicon, seen, out);
    }
    return out;
}

}  // namespace pixie
