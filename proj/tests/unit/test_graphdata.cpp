#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "pixie/benchmark_data.hpp"
#include "pixie/errors.hpp"
#include "pixie/graph.hpp"

using namespace pixie;

namespace {

constexpr const char* kFigureOne =
    R"({"nodes":["_picture_n","_tell_v","_story_n"],"edges":[[1,"ARG1",0],[1,"ARG2",2]]})";

Sembank parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_sembank(in);
}

}  // namespace

TEST_SUITE("graphdata") {

TEST_CASE("figure one record parses into a three node graph")
{
    const auto bank = parse(std::string(kFigureOne) + "\n");
    REQUIRE(bank.graphs.size() == 1);
    const auto& g = bank.graphs[0];
    const auto& v = bank.vocabulary;
    REQUIRE(g.node_count() == 3);
    CHECK(v.predicate_name(*g.nodes[0]) == "_picture_n");
    CHECK(v.predicate_name(*g.nodes[1]) == "_tell_v");
    CHECK(v.predicate_name(*g.nodes[2]) == "_story_n");
    const auto arg1 = *v.find_label("ARG1");
    const auto arg2 = *v.find_label("ARG2");
    CHECK(g.edges == std::vector<Edge>{{1, arg1, 0}, {1, arg2, 2}});
}

TEST_CASE("single node record has no edges")
{
    const auto bank = parse(R"({"nodes":["_run_v"],"edges":[]})");
    REQUIRE(bank.graphs.size() == 1);
    CHECK(bank.graphs[0].node_count() == 1);
    CHECK(bank.graphs[0].edges.empty());
}

TEST_CASE("null predicates parse as masked nodes")
{
    const auto bank = parse(R"({"nodes":[null,"_tell_v"],"edges":[[1,"ARG1",0]]})");
    CHECK(bank.graphs[0].is_masked(0));
    CHECK_FALSE(bank.graphs[0].is_masked(1));
    CHECK(bank.vocabulary.predicate_count() == 1);
}

TEST_CASE("structural violations are rejected")
{
    CHECK_THROWS_AS(parse(R"({"nodes":["_a_n"],"edges":[[0,"ARG1",0]]})"), DataError);
    CHECK_THROWS_AS(parse(R"({"nodes":["_a_n","_b_n"],"edges":[]})"), DataError);
    CHECK_THROWS_AS(parse(R"({"nodes":["_a_n","_b_n"],"edges":[[0,"ARG1",2]]})"), DataError);
    CHECK_THROWS_AS(parse(R"({"nodes":[],"edges":[]})"), DataError);
    CHECK_THROWS_AS(
        parse(R"({"nodes":["_a","_b","_c"],"edges":[[0,"ARG1",1],[0,"ARG1",2]]})"),
        DataError);
}

TEST_CASE("malformed json reports its line number")
{
    try {
        parse(std::string(kFigureOne) + "\n{\"nodes\": [\n");
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find('2') != std::string::npos);
    }
}

TEST_CASE("blank lines are skipped and empty input gives an empty sembank")
{
    CHECK(parse("").graphs.empty());
    CHECK(parse("\n\n" + std::string(kFigureOne) + "\n\n").graphs.size() == 1);
}

TEST_CASE("frequencies count every occurrence")
{
    const auto bank = parse(std::string(kFigureOne) + "\n"
                            + R"({"nodes":["_story_n","_tell_v",null],"edges":[[1,"ARG1",0],[1,"ARG2",2]]})");
    const auto& v = bank.vocabulary;
    CHECK(v.frequency(*v.find_predicate("_picture_n")) == 1);
    CHECK(v.frequency(*v.find_predicate("_tell_v")) == 2);
    CHECK(v.frequency(*v.find_predicate("_story_n")) == 2);
    std::uint64_t total = 0;
    for (const auto& p : v.predicates())
        total += p.frequency;
    CHECK(total == 5);
}

TEST_CASE("write then parse round trips")
{
    const auto bank = parse(std::string(kFigureOne) + "\n"
                            + R"({"nodes":[null,"_tell_v","_picture_n"],"edges":[[1,"ARG2",2],[1,"ARG1",0]]})");
    std::ostringstream out;
    write_sembank(out, bank.graphs, bank.vocabulary);
    const auto again = parse(out.str());
    CHECK(again.graphs == bank.graphs);
    for (const auto& g : bank.graphs)
        CHECK(parse_graph(to_json(g, bank.vocabulary), bank.vocabulary) == g);
}

TEST_CASE("parse_graph rejects names outside a fixed vocabulary")
{
    const auto bank = parse(kFigureOne);
    CHECK_THROWS_AS(parse_graph(std::string_view(R"({"nodes":["_zebra_n"],"edges":[]})"),
                                bank.vocabulary),
                    DataError);
}

TEST_CASE("topology erases predicates and is idempotent")
{
    const auto bank = parse(kFigureOne);
    const auto t = topology_of(bank.graphs[0]);
    CHECK(t.node_count == 3);
    CHECK(t.edges == bank.graphs[0].edges);
    CHECK(topology_of(t) == t);

    const auto single = parse(R"({"nodes":["_run_v"],"edges":[]})");
    CHECK(topology_of(single.graphs[0]) == GraphTopology{1, {}});
}

TEST_CASE("apply_mask extremes and concentration")
{
    const auto bank = parse(kFigureOne);
    const auto& g = bank.graphs[0];
    std::mt19937_64 rng(3);
    CHECK(apply_mask(g, 0.0, rng) == g);
    const auto all = apply_mask(g, 1.0, rng);
    for (std::size_t i = 0; i < all.node_count(); ++i)
        CHECK(all.is_masked(i));
    CHECK(all.edges == g.edges);
    CHECK_THROWS_AS(apply_mask(g, -0.1, rng), std::invalid_argument);
    CHECK_THROWS_AS(apply_mask(g, 1.5, rng), std::invalid_argument);

    DependencyGraph chain;
    for (std::size_t i = 0; i < 10000; ++i) {
        chain.nodes.emplace_back(0u);
        if (i > 0)
            chain.edges.push_back({i - 1, 0, i});
    }
    std::mt19937_64 seeded(11);
    const auto masked = apply_mask(chain, 0.5, seeded);
    std::size_t count = 0;
    for (std::size_t i = 0; i < masked.node_count(); ++i)
        count += masked.is_masked(i);
    CHECK(std::abs(static_cast<double>(count) / 10000.0 - 0.5) <= 0.02);
    CHECK(masked.edges == chain.edges);

    std::mt19937_64 again(11);
    CHECK(apply_mask(chain, 0.5, again) == masked);
}

TEST_CASE("ranking rows")
{
    std::istringstream in("device\tSBJ\tdevice\tuse\tastronomer\n"
                          "quality\tOBJ\tquality\tbookmaker\tlack\n");
    const auto bench = load_ranking_benchmark(in);
    REQUIRE(bench.properties.size() == 2);
    const auto& p = bench.properties[0];
    CHECK(p.term == "device");
    CHECK(p.role == Role::Subject);
    CHECK(p.head_noun == "device");
    CHECK(p.verb == "use");
    CHECK(p.arg_noun == "astronomer");
    CHECK(bench.properties[1].role == Role::Object);
    CHECK(bench.terms == std::vector<std::string>{"device", "quality"});
}

TEST_CASE("similarity rows")
{
    std::istringstream in("show\tmap\tlocation\texpress\t6\ta01\n");
    const auto bench = load_similarity_benchmark(in);
    REQUIRE(bench.judgements.size() == 1);
    const auto& j = bench.judgements[0];
    CHECK(j.verb1 == "show");
    CHECK(j.subject == "map");
    CHECK(j.object == "location");
    CHECK(j.verb2 == "express");
    CHECK(j.score == 6.0);
    CHECK(j.annotator == "a01");
}

TEST_CASE("benchmark loader errors and empty files")
{
    std::istringstream empty("");
    CHECK(load_ranking_benchmark(empty).properties.empty());
    std::istringstream empty2("");
    CHECK(load_similarity_benchmark(empty2).judgements.empty());

    std::istringstream bad_role("device\tXYZ\tdevice\tuse\tastronomer\n");
    CHECK_THROWS_AS(load_ranking_benchmark(bad_role), DataError);
    std::istringstream short_row("device\tSBJ\tdevice\n");
    CHECK_THROWS_AS(load_ranking_benchmark(short_row), DataError);
    std::istringstream bad_score("map\tshow\tlocation\texpress\tsix\ta01\n");
    CHECK_THROWS_AS(load_similarity_benchmark(bad_score), DataError);
}

TEST_CASE("lexicon resolution and out of vocabulary reporting")
{
    Vocabulary vocab;
    vocab.add_predicate("_device_n");
    vocab.add_predicate("_use_v");
    Lexicon lex;
    lex.add("device", "_device_n");
    lex.add("use", "_use_v");
    CHECK(lex.resolve("device", vocab) == NodePredicate{0u});
    const auto masked = lex.resolve("*", vocab);
    REQUIRE(masked.has_value());
    CHECK_FALSE(masked->has_value());
    CHECK_FALSE(lex.resolve("astronomer", vocab).has_value());

    std::istringstream in("device\tSBJ\tdevice\tuse\tastronomer\n");
    const auto oov = out_of_vocabulary(load_ranking_benchmark(in), vocab, lex);
    CHECK(oov == std::vector<std::string>{"astronomer"});
}

}
