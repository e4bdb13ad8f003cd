#include "pixie/graph.hpp"

#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "pixie/errors.hpp"

namespace pixie {

using nlohmann::json;

PredicateId Vocabulary::add_predicate(std::string_view name, std::uint64_t count)
{
    auto it = predicate_index_.find(std::string(name));
    if (it != predicate_index_.end()) {
        predicates_[it->second].frequency += count;
        return it->second;
    }
    const auto id = static_cast<PredicateId>(predicates_.size());
    predicates_.push_back({std::string(name), count});
    predicate_index_.emplace(std::string(name), id);
    return id;
}

LabelId Vocabulary::add_label(std::string_view name)
{
    auto it = label_index_.find(std::string(name));
    if (it != label_index_.end())
        return it->second;
    const auto id = static_cast<LabelId>(labels_.size());
    labels_.emplace_back(name);
    label_index_.emplace(std::string(name), id);
    return id;
}

std::optional<PredicateId> Vocabulary::find_predicate(std::string_view name) const
{
    auto it = predicate_index_.find(std::string(name));
    if (it == predicate_index_.end())
        return std::nullopt;
    return it->second;
}

std::optional<LabelId> Vocabulary::find_label(std::string_view name) const
{
    auto it = label_index_.find(std::string(name));
    if (it == label_index_.end())
        return std::nullopt;
    return it->second;
}

void validate_structure(std::size_t node_count, std::span<const Edge> edges,
                        std::size_t label_count)
{
    if (node_count == 0)
        throw DataError("graph has no nodes");

    std::set<std::pair<NodeId, LabelId>> heads;
    std::vector<NodeId> parent(node_count);
    std::iota(parent.begin(), parent.end(), NodeId{0});
    auto find = [&](NodeId n) {
        while (parent[n] != n) {
            parent[n] = parent[parent[n]];
            n = parent[n];
        }
        return n;
    };

    std::size_t components = node_count;
    for (const auto& e : edges) {
        if (e.source >= node_count || e.target >= node_count)
            throw DataError("edge references node outside graph");
        if (e.label >= label_count)
            throw DataError("edge label id out of range");
        if (e.source == e.target)
            throw DataError("self-loop on node " + std::to_string(e.source));
        if (!heads.emplace(e.source, e.label).second)
            throw DataError("node " + std::to_string(e.source)
                            + " has two outgoing edges with the same label");
        const auto a = find(e.source);
        const auto b = find(e.target);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    if (components != 1)
        throw DataError("graph is disconnected");
}

void validate(const DependencyGraph& graph, const Vocabulary& vocab)
{
    for (const auto& p : graph.nodes) {
        if (p && *p >= vocab.predicate_count())
            throw DataError("predicate id out of range");
    }
    validate_structure(graph.node_count(), graph.edges, vocab.label_count());
}

namespace {

// Shared by the vocabulary-building and the fixed-vocabulary parsers.
template <typename PredicateLookup, typename LabelLookup>
DependencyGraph parse_record(const json& record, PredicateLookup&& predicate_id,
                             LabelLookup&& label_id)
{
    if (!record.is_object())
        throw DataError("record is not a JSON object");
    if (!record.contains("nodes") || !record["nodes"].is_array())
        throw DataError("record lacks a \"nodes\" array");

    DependencyGraph graph;
    for (const auto& node : record["nodes"]) {
        if (node.is_null())
            graph.nodes.push_back(kMasked);
        else if (node.is_string())
            graph.nodes.push_back(predicate_id(node.get<std::string>()));
        else
            throw DataError("node entry must be a predicate name or null");
    }

    if (record.contains("edges")) {
        const auto& edges = record["edges"];
        if (!edges.is_array())
            throw DataError("\"edges\" must be an array");
        for (const auto& e : edges) {
            if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer()
                || !e[1].is_string() || !e[2].is_number_integer())
                throw DataError("edge must be [source, \"label\", target]");
            const auto src = e[0].get<std::int64_t>();
            const auto tgt = e[2].get<std::int64_t>();
            if (src < 0 || tgt < 0)
                throw DataError("negative node index in edge");
            graph.edges.push_back({static_cast<NodeId>(src), label_id(e[1].get<std::string>()),
                                   static_cast<NodeId>(tgt)});
        }
    }
    return graph;
}

}  // namespace

Sembank parse_sembank(std::istream& in)
{
    Sembank bank;
    auto& vocab = bank.vocabulary;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            const json record = json::parse(line);
            auto graph = parse_record(
                record, [&](const std::string& name) { return vocab.add_predicate(name); },
                [&](const std::string& name) { return vocab.add_label(name); });
            validate(graph, vocab);
            bank.graphs.push_back(std::move(graph));
        } catch (const json::exception& e) {
            throw DataError("sembank line " + std::to_string(line_no) + ": malformed JSON: "
                            + e.what());
        } catch (const DataError& e) {
            throw DataError("sembank line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return bank;
}

DependencyGraph parse_graph(const json& record, const Vocabulary& vocab)
{
    auto graph = parse_record(
        record,
        [&](const std::string& name) {
            auto id = vocab.find_predicate(name);
            if (!id)
                throw DataError("unknown predicate '" + name + "'");
            return *id;
        },
        [&](const std::string& name) {
            auto id = vocab.find_label(name);
            if (!id)
                throw DataError("unknown label '" + name + "'");
            return *id;
        });
    validate(graph, vocab);
    return graph;
}

DependencyGraph parse_graph(std::string_view line, const Vocabulary& vocab)
{
    json record;
    try {
        record = json::parse(line);
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed graph JSON: ") + e.what());
    }
    return parse_graph(record, vocab);
}

json to_json(const DependencyGraph& graph, const Vocabulary& vocab)
{
    json nodes = json::array();
    for (const auto& p : graph.nodes) {
        if (p)
            nodes.push_back(vocab.predicate_name(*p));
        else
            nodes.push_back(nullptr);
    }
    json edges = json::array();
    for (const auto& e : graph.edges)
        edges.push_back(json::array({e.source, vocab.label_name(e.label), e.target}));
    return json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

void write_sembank(std::ostream& out, std::span<const DependencyGraph> graphs,
                   const Vocabulary& vocab)
{
    for (const auto& g : graphs)
        out << to_json(g, vocab).dump() << '\n';
}

GraphTopology topology_of(const DependencyGraph& graph)
{
    return {graph.node_count(), graph.edges};
}

DependencyGraph apply_mask(const DependencyGraph& graph, double rate, std::mt19937_64& rng)
{
    if (!(rate >= 0.0 && rate <= 1.0))
        throw std::invalid_argument("mask rate must lie in [0, 1]");
    DependencyGraph out = graph;
    std::bernoulli_distribution mask(rate);
    for (auto& p : out.nodes) {
        if (mask(rng))
            p = kMasked;
    }
    return out;
}

}  // namespace pixie
