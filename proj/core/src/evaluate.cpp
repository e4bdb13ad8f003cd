#include "pixie/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "pixie/encoder.hpp"
#include "pixie/errors.hpp"

namespace pixie {

namespace {

struct ResolvedProperty {
    std::size_t row = 0;
    DependencyGraph graph;
    NodeId target = 0;
};

nlohmann::json spearman_json(const SpearmanResult& r)
{
    return {{"rho", r.rho}, {"degenerate", r.degenerate}};
}

}  // namespace

double infer_truth(const DependencyGraph& graph, NodeId target, PredicateId a,
                   const ModelStack& model)
{
    if (target >= graph.node_count())
        throw std::out_of_range("target node " + std::to_string(target) + " is not in the graph");
    if (a >= model.lexical.predicate_count())
        throw std::out_of_range("predicate id " + std::to_string(a) + " is not in the vocabulary");
    validate(graph, model.vocabulary);
    const auto mf = encode(graph, model.encoder, model.cardinality());
    return expected_truth(mf.q[target], a, model.lexical);
}

DependencyGraph svo_graph(NodePredicate subject, PredicateId verb, NodePredicate object,
                          const Vocabulary& vocab)
{
    const auto arg1 = vocab.find_label("ARG1");
    const auto arg2 = vocab.find_label("ARG2");
    if (!arg1 || !arg2)
        throw DataError("vocabulary lacks the ARG1 and ARG2 labels");
    DependencyGraph g;
    g.nodes = {subject, verb, object};
    g.edges = {{kVerbNode, *arg1, kSubjectNode}, {kVerbNode, *arg2, kObjectNode}};
    return g;
}

double average_precision(const std::vector<bool>& ranked_relevance)
{
    if (ranked_relevance.empty())
        throw std::invalid_argument("average precision of an empty ranking");
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked_relevance.size(); ++i) {
        if (!ranked_relevance[i])
            continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    if (hits == 0)
        throw std::invalid_argument("average precision needs a relevant item");
    return sum / static_cast<double>(hits);
}

std::vector<double> average_ranks(std::span<const double> xs)
{
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && xs[order[j]] == xs[order[i]])
            ++j;
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.empty() || ys.empty())
        throw std::invalid_argument("spearman of an empty sample");
    if (xs.size() != ys.size())
        throw std::invalid_argument("spearman inputs differ in length");
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    const double n = static_cast<double>(rx.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mx;
        const double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        return {0.0, true};
    return {sxy / std::sqrt(sxx * syy), false};
}

std::optional<double> RankedResult::confounder_mean_rank() const
{
    if (confounder_ranks.empty())
        return std::nullopt;
    const double sum = std::accumulate(confounder_ranks.begin(), confounder_ranks.end(), 0.0);
    return sum / static_cast<double>(confounder_ranks.size());
}

RankedResult rank_items(std::string query, std::span<const double> scores,
                        const std::vector<bool>& relevant)
{
    if (scores.size() != relevant.size())
        throw std::invalid_argument("scores and relevance flags differ in length");
    RankedResult out;
    out.query = std::move(query);
    out.ranking.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        out.ranking.push_back({i, scores[i], relevant[i]});
    std::stable_sort(out.ranking.begin(), out.ranking.end(),
                     [](const RankedCandidate& a, const RankedCandidate& b) {
                         return a.score > b.score;
                     });
    std::vector<bool> flags;
    flags.reserve(out.ranking.size());
    for (const auto& c : out.ranking)
        flags.push_back(c.relevant);
    out.average_precision = average_precision(flags);
    return out;
}

nlohmann::json RankingReport::to_json() const
{
    nlohmann::json per_term = nlohmann::json::array();
    for (const auto& t : terms) {
        nlohmann::json ranking = nlohmann::json::array();
        for (const auto& c : t.ranking)
            ranking.push_back({{"property", c.item}, {"score", c.score}, {"relevant", c.relevant}});
        nlohmann::json entry = {{"term", t.query},
                                {"average_precision", t.average_precision},
                                {"ranking", ranking}};
        if (const auto m = t.confounder_mean_rank())
            entry["confounder_mean_rank"] = *m;
        else
            entry["confounder_mean_rank"] = nullptr;
        per_term.push_back(std::move(entry));
    }
    return {{"task", "ranking"},
            {"map", map},
            {"terms_scored", terms.size()},
            {"properties_scored", properties_scored},
            {"skipped_terms", skipped_terms},
            {"skipped_properties", skipped_properties},
            {"out_of_vocabulary", out_of_vocabulary},
            {"per_term", per_term}};
}

RankingReport score_ranking(const RankingBenchmark& bench, const ModelStack& model,
                            const Lexicon& lexicon)
{
    const auto& vocab = model.vocabulary;
    RankingReport report;
    report.out_of_vocabulary = out_of_vocabulary(bench, vocab, lexicon);

    std::vector<ResolvedProperty> usable;
    for (std::size_t row = 0; row < bench.properties.size(); ++row) {
        const auto& p = bench.properties[row];
        const auto head = lexicon.resolve(p.head_noun, vocab);
        const auto verb = lexicon.resolve(p.verb, vocab);
        const auto arg = lexicon.resolve(p.arg_noun, vocab);
        if (!head || !verb || !arg || !verb->has_value()) {
            ++report.skipped_properties;
            continue;
        }
        ResolvedProperty rp;
        rp.row = row;
        if (p.role == Role::Subject) {
            rp.graph = svo_graph(*head, **verb, *arg, vocab);
            rp.target = kSubjectNode;
        } else {
            rp.graph = svo_graph(*arg, **verb, *head, vocab);
            rp.target = kObjectNode;
        }
        usable.push_back(std::move(rp));
    }
    report.properties_scored = usable.size();

    // The encoding of a property does not depend on the term applied to it.
    std::vector<Eigen::VectorXd> target_q;
    target_q.reserve(usable.size());
    for (const auto& rp : usable)
        target_q.push_back(encode(rp.graph, model.encoder, model.cardinality()).q[rp.target]);

    double ap_sum = 0.0;
    for (const auto& term : bench.terms) {
        const auto pred = lexicon.resolve(term, vocab);
        if (!pred || !pred->has_value()) {
            ++report.skipped_terms;
            continue;
        }
        std::vector<double> scores;
        std::vector<bool> relevant(usable.size());
        bool any = false;
        for (std::size_t i = 0; i < usable.size(); ++i) {
            const auto& p = bench.properties[usable[i].row];
            scores.push_back(expected_truth(target_q[i], **pred, model.lexical));
            relevant[i] = p.term == term;
            any = any || relevant[i];
        }
        if (!any) {
            ++report.skipped_terms;
            continue;
        }
        auto result = rank_items(term, scores, relevant);
        for (std::size_t k = 0; k < result.ranking.size(); ++k) {
            auto& c = result.ranking[k];
            const auto& p = bench.properties[usable[c.item].row];
            c.item = usable[c.item].row;
            const bool mentions = p.head_noun == term || p.verb == term || p.arg_noun == term;
            if (!c.relevant && mentions)
                result.confounder_ranks.push_back(k + 1);
        }
        ap_sum += result.average_precision;
        report.terms.push_back(std::move(result));
    }
    if (!report.terms.empty())
        report.map = ap_sum / static_cast<double>(report.terms.size());
    return report;
}

double random_baseline_map(std::span<const std::vector<bool>> relevance, std::size_t trials,
                           std::mt19937_64& rng)
{
    if (relevance.empty() || trials == 0)
        throw std::invalid_argument("random baseline needs queries and trials");
    double total = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        double ap_sum = 0.0;
        for (const auto& flags : relevance) {
            auto shuffled = flags;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            ap_sum += average_precision(shuffled);
        }
        total += ap_sum / static_cast<double>(relevance.size());
    }
    return total / static_cast<double>(trials);
}

std::vector<std::vector<bool>> relevance_lists(const RankingReport& report)
{
    std::vector<std::vector<bool>> out;
    out.reserve(report.terms.size());
    for (const auto& t : report.terms) {
        std::vector<bool> flags;
        flags.reserve(t.ranking.size());
        for (const auto& c : t.ranking)
            flags.push_back(c.relevant);
        out.push_back(std::move(flags));
    }
    return out;
}

std::string_view to_string(SimilarityMode mode)
{
    return mode == SimilarityMode::OneDirection ? "one" : "both";
}

nlohmann::json SimilarityReport::to_json() const
{
    nlohmann::json scored = nlohmann::json::array();
    for (const auto& s : items)
        scored.push_back({{"row", s.index}, {"score", s.model_score}, {"judgement", s.judgement}});
    return {{"task", "similarity"},
            {"mode", to_string(mode)},
            {"separate", spearman_json(separate)},
            {"averaged", spearman_json(averaged)},
            {"judgements_scored", items.size()},
            {"distinct_pairs", distinct_pairs},
            {"skipped", skipped},
            {"out_of_vocabulary", out_of_vocabulary},
            {"items", scored}};
}

SimilarityReport score_similarity(const SimilarityBenchmark& bench, SimilarityMode mode,
                                  const ModelStack& model, const Lexicon& lexicon)
{
    const auto& vocab = model.vocabulary;
    SimilarityReport report;
    report.mode = mode;
    report.out_of_vocabulary = out_of_vocabulary(bench, vocab, lexicon);

    using Key = std::tuple<std::string, std::string, std::string, std::string>;
    std::map<Key, double> cache;
    std::map<Key, std::pair<double, std::vector<double>>> pairs;

    for (std::size_t row = 0; row < bench.judgements.size(); ++row) {
        const auto& j = bench.judgements[row];
        const auto v1 = lexicon.resolve(j.verb1, vocab);
        const auto v2 = lexicon.resolve(j.verb2, vocab);
        const auto subj = lexicon.resolve(j.subject, vocab);
        const auto obj = lexicon.resolve(j.object, vocab);
        if (!v1 || !v2 || !subj || !obj || !v1->has_value() || !v2->has_value()) {
            ++report.skipped;
            continue;
        }
        const Key key{j.verb1, j.subject, j.object, j.verb2};
        auto it = cache.find(key);
        if (it == cache.end()) {
            double score = infer_truth(svo_graph(*subj, **v1, *obj, vocab), kVerbNode, **v2, model);
            if (mode == SimilarityMode::BothDirections) {
                score += infer_truth(svo_graph(*subj, **v2, *obj, vocab), kVerbNode, **v1, model);
                score *= 0.5;
            }
            it = cache.emplace(key, score).first;
        }
        report.items.push_back({row, it->second, j.score});
        auto& entry = pairs[key];
        entry.first = it->second;
        entry.second.push_back(j.score);
    }
    report.distinct_pairs = pairs.size();
    if (report.items.empty()) {
        report.separate = {0.0, true};
        report.averaged = {0.0, true};
        return report;
    }

    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& s : report.items) {
        xs.push_back(s.model_score);
        ys.push_back(s.judgement);
    }
    report.separate = spearman(xs, ys);

    xs.clear();
    ys.clear();
    for (const auto& [key, entry] : pairs) {
        xs.push_back(entry.first);
        ys.push_back(std::accumulate(entry.second.begin(), entry.second.end(), 0.0)
                     / static_cast<double>(entry.second.size()));
    }
    report.averaged = spearman(xs, ys);
    return report;
}

}  // namespace pixie
