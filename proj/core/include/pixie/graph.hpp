#pragma once

// Semantic dependency graphs, the vocabulary they index into, and the JSON
// Lines sembank format:
//
//   {"nodes":["_picture_n","_tell_v","_story_n"],"edges":[[1,"ARG1",0],[1,"ARG2",2]]}
//
// A null entry in "nodes" is a MASKED node (no observed predicate).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace pixie {

using PredicateId = std::uint32_t;
using LabelId = std::uint32_t;
using NodeId = std::size_t;

// Absent predicate: the node is MASKED.
using NodePredicate = std::optional<PredicateId>;
inline constexpr std::nullopt_t kMasked = std::nullopt;

struct Edge {
    NodeId source = 0;
    LabelId label = 0;
    NodeId target = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

class Vocabulary {
public:
    struct PredicateEntry {
        std::string name;
        std::uint64_t frequency = 0;

        friend bool operator==(const PredicateEntry&, const PredicateEntry&) = default;
    };

    Vocabulary() = default;

    // Adds `count` occurrences of `name`, creating the predicate if needed.
    PredicateId add_predicate(std::string_view name, std::uint64_t count = 1);
    LabelId add_label(std::string_view name);

    std::optional<PredicateId> find_predicate(std::string_view name) const;
    std::optional<LabelId> find_label(std::string_view name) const;

    const std::string& predicate_name(PredicateId id) const { return predicates_.at(id).name; }
    std::uint64_t frequency(PredicateId id) const { return predicates_.at(id).frequency; }
    const std::string& label_name(LabelId id) const { return labels_.at(id); }

    std::size_t predicate_count() const { return predicates_.size(); }
    std::size_t label_count() const { return labels_.size(); }

    std::span<const PredicateEntry> predicates() const { return predicates_; }
    std::span<const std::string> labels() const { return labels_; }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b)
    {
        return a.predicates_ == b.predicates_ && a.labels_ == b.labels_;
    }

private:
    std::vector<PredicateEntry> predicates_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, PredicateId> predicate_index_;
    std::unordered_map<std::string, LabelId> label_index_;
};

// Labelled edges over unlabelled nodes.
struct GraphTopology {
    std::size_t node_count = 0;
    std::vector<Edge> edges;

    friend bool operator==(const GraphTopology&, const GraphTopology&) = default;
};

struct DependencyGraph {
    std::vector<NodePredicate> nodes;
    std::vector<Edge> edges;

    std::size_t node_count() const { return nodes.size(); }
    bool is_masked(NodeId n) const { return !nodes.at(n).has_value(); }

    friend bool operator==(const DependencyGraph&, const DependencyGraph&) = default;
};

struct Sembank {
    std::vector<DependencyGraph> graphs;
    Vocabulary vocabulary;
};

// Throws DataError on a self-loop, a repeated (source, label) pair, an
// out-of-range node or label, an empty node set, or a disconnected graph.
void validate_structure(std::size_t node_count, std::span<const Edge> edges,
                        std::size_t label_count);
void validate(const DependencyGraph& graph, const Vocabulary& vocab);

// Reads a whole sembank, building the vocabulary in first-seen order.
// Errors carry the 1-based line number. Blank lines are skipped.
Sembank parse_sembank(std::istream& in);

// Parses one record against a fixed vocabulary; unknown names are errors.
DependencyGraph parse_graph(const nlohmann::json& record, const Vocabulary& vocab);
DependencyGraph parse_graph(std::string_view line, const Vocabulary& vocab);

nlohmann::json to_json(const DependencyGraph& graph, const Vocabulary& vocab);
void write_sembank(std::ostream& out, std::span<const DependencyGraph> graphs,
                   const Vocabulary& vocab);

GraphTopology topology_of(const DependencyGraph& graph);
inline GraphTopology topology_of(const GraphTopology& topology) { return topology; }

// Each node independently becomes MASKED with probability `rate`.
DependencyGraph apply_mask(const DependencyGraph& graph, double rate, std::mt19937_64& rng);

}  // namespace pixie
