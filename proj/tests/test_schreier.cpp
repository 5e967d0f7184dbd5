/**
 * @file test_schreier.cpp
 * @brief Unit tests for level graphs, orbit balls, graph serialization and
 *        tree decompositions.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <selfsim/contraction.hpp>
#include <selfsim/schreier.hpp>
#include <selfsim/transducer.hpp>

#include <algorithm>
#include <map>
#include <set>

#include "fixtures.hpp"

using namespace selfsim;

namespace {

Transducer odometer() { return Transducer::from_json(json::parse(fixtures::kOdometer)); }
Transducer hanoi() { return Transducer::from_json(json::parse(fixtures::kHanoi)); }
Transducer longrange() { return Transducer::from_json(json::parse(fixtures::kLongRange)); }
Transducer partial() { return Transducer::from_json(json::parse(fixtures::kPartial)); }

using Edge = std::array<std::string, 3>;

}  // namespace

TEST_CASE("odometer full level-2 graph is a 4-cycle") {
    LabelledGraph g = build_graph(odometer(), 2, GraphKind::Full);
    CHECK(g.vertices == std::vector<std::string>{"00", "01", "10", "11"});
    CHECK(g.edges == std::vector<Edge>{{"00", "t", "10"},
                                       {"01", "t", "11"},
                                       {"10", "t", "01"},
                                       {"11", "t", "00"}});
    CHECK(g.holes.empty());
}

TEST_CASE("tower machine level-1 graphs") {
    LabelledGraph full = build_graph(hanoi(), 1, GraphKind::Full);
    CHECK(full.edges == std::vector<Edge>{{"0", "a", "1"},
                                          {"0", "b", "2"},
                                          {"0", "c", "0"},
                                          {"1", "a", "0"},
                                          {"1", "b", "1"},
                                          {"1", "c", "2"},
                                          {"2", "a", "2"},
                                          {"2", "b", "0"},
                                          {"2", "c", "1"}});

    LabelledGraph tile = build_graph(hanoi(), 1, GraphKind::Tile);
    CHECK(tile.edges == std::vector<Edge>{{"0", "a", "1"},
                                          {"0", "b", "2"},
                                          {"1", "a", "0"},
                                          {"1", "c", "2"},
                                          {"2", "b", "0"},
                                          {"2", "c", "1"}});

    LabelledGraph simple = build_graph(hanoi(), 1, GraphKind::Simple);
    CHECK(simple.edges == std::vector<Edge>{{"0", "a", "1"},
                                            {"0", "b", "2"},
                                            {"1", "c", "2"}});
}

TEST_CASE("odometer tile graphs are paths") {
    for (int n = 1; n <= 4; ++n) {
        LabelledGraph tile = build_graph(odometer(), n, GraphKind::Tile);
        CHECK(static_cast<int>(tile.edges.size()) == (1 << n) - 1);
        // no tile edge leaves the all-ones word (the carry propagates fully)
        for (const auto& e : tile.edges) CHECK(e[0] != std::string(n, '1'));
    }
}

TEST_CASE("tile-graph out-degrees characterize the post-critical words") {
    for (Transducer base : {odometer(), hanoi()}) {
        Transducer nuc = *nucleus(base).machine;
        auto P = post_critical_set(nuc);
        for (int n = 1; n <= 5; ++n) {
            LabelledGraph tile = build_graph(nuc, n, GraphKind::Tile);
            std::map<std::string, int> outdeg;
            for (const auto& v : tile.vertices) outdeg[v] = 0;
            for (const auto& e : tile.edges) ++outdeg[e[0]];
            std::set<std::string> low;
            for (const auto& [v, d] : outdeg)
                if (d < static_cast<int>(nuc.generators.size())) low.insert(v);
            std::set<std::string> expected;
            for (const auto& w : suffix_set(P, n)) expected.insert(level_word_id(nuc, w));
            CHECK(low == expected);
        }
    }
}

TEST_CASE("long-range ball of radius 1 around the zero ray") {
    Ray zero{{}, {0}};
    LabelledGraph b = ball_around_ray(longrange(), zero, 1);
    CHECK(b.root == "0 ^inf");
    CHECK(b.vertices == std::vector<std::string>{"0 ^inf", "1 ^inf", "1 | 0 ^inf"});
    CHECK(b.edges == std::vector<Edge>{{"0 ^inf", "t", "1 | 0 ^inf"},
                                       {"0 ^inf", "u", "0 ^inf"},
                                       {"1 ^inf", "t", "0 ^inf"},
                                       {"1 ^inf", "u", "1 | 0 ^inf"}});

    LabelledGraph b0 = ball_around_ray(longrange(), zero, 0);
    CHECK(b0.vertices == std::vector<std::string>{"0 ^inf"});
    CHECK(b0.edges == std::vector<Edge>{{"0 ^inf", "u", "0 ^inf"}});
}

TEST_CASE("tower-machine ball of radius 1") {
    LabelledGraph b = ball_around_ray(hanoi(), Ray{{}, {0}}, 1);
    CHECK(b.vertices ==
          std::vector<std::string>{"0 ^inf", "1 | 0 ^inf", "2 | 0 ^inf"});
    CHECK(b.edges == std::vector<Edge>{{"0 ^inf", "a", "1 | 0 ^inf"},
                                       {"0 ^inf", "b", "2 | 0 ^inf"},
                                       {"0 ^inf", "c", "0 ^inf"},
                                       {"1 | 0 ^inf", "a", "0 ^inf"},
                                       {"1 | 0 ^inf", "c", "2 | 0 ^inf"},
                                       {"2 | 0 ^inf", "b", "0 ^inf"},
                                       {"2 | 0 ^inf", "c", "1 | 0 ^inf"}});
}

TEST_CASE("orbit balls match balls in deep level graphs") {
    struct Probe {
        Transducer t;
        int level;
    };
    for (auto& [t, level] : std::vector<Probe>{{odometer(), 6}, {hanoi(), 5}, {longrange(), 8}}) {
        LabelledGraph lvl = build_graph(t, level, GraphKind::Full);
        std::string origin(std::string::size_type(0), '0');
        for (int i = 0; i < level; ++i) origin += t.alphabet[0];
        for (int r = 0; r <= 3; ++r) {
            LabelledGraph from_ray = ball_around_ray(t, Ray{{}, {0}}, r);
            LabelledGraph from_level = extract_ball(lvl, origin, r);
            CHECK(canonical_rooted_form(from_ray) == canonical_rooted_form(from_level));
        }
    }
}

TEST_CASE("graph JSON and DOT serialization") {
    LabelledGraph g = build_graph(hanoi(), 2, GraphKind::Tile);
    LabelledGraph h = LabelledGraph::from_json(g.to_json());
    CHECK(h.to_json() == g.to_json());

    LabelledGraph c = build_graph(odometer(), 2, GraphKind::Full);
    std::string dot = c.to_dot();
    CHECK(dot.find("\"00\" -> \"10\" [label=\"t\"];") != std::string::npos);
    CHECK(dot.rfind("digraph G {", 0) == 0);

    json bad = json::parse(R"({"vertices":["a"],"edges":[["a","t","b"]]})");
    CHECK_THROWS_AS(LabelledGraph::from_json(bad), Error);
}

TEST_CASE("partial machines leave holes instead of edges") {
    LabelledGraph g = build_graph(partial(), 2, GraphKind::Full);
    CHECK(g.edges == std::vector<Edge>{{"00", "p", "11"}});
    CHECK(g.holes == std::vector<std::pair<std::string, std::string>>{
                         {"01", "p"}, {"10", "p"}, {"11", "p"}});

    LabelledGraph b = ball_around_ray(partial(), Ray{{}, {0}}, 1);
    CHECK(b.vertices == std::vector<std::string>{"0 ^inf", "1 ^inf"});
    CHECK(b.edges == std::vector<Edge>{{"0 ^inf", "p", "1 ^inf"}});
    CHECK(b.holes == std::vector<std::pair<std::string, std::string>>{
                         {"0 ^inf", "p^-1"}, {"1 ^inf", "p"}});
}

TEST_CASE("tree decompositions verify and stay within the width bound") {
    Transducer nh = *nucleus(hanoi()).machine;
    auto Ph = post_critical_set(nh);
    for (int n = 0; n <= 3; ++n) {
        TreeDecomposition td = tree_decomposition(nh, Ph, n);
        CHECK(check_tree_decomposition(build_graph(nh, n, GraphKind::Full), td).empty());
        CHECK(td.width <= 8);
    }

    Transducer no = *nucleus(odometer()).machine;
    auto Po = post_critical_set(no);
    for (int n = 0; n <= 4; ++n) {
        TreeDecomposition td = tree_decomposition(no, Po, n);
        CHECK(check_tree_decomposition(build_graph(no, n, GraphKind::Full), td).empty());
        CHECK(td.width <= 3);
    }
}

TEST_CASE("tampered decompositions are rejected") {
    Transducer no = *nucleus(odometer()).machine;
    auto Po = post_critical_set(no);
    TreeDecomposition td = tree_decomposition(no, Po, 2);
    LabelledGraph g = build_graph(no, 2, GraphKind::Full);

    TreeDecomposition broken = td;
    for (auto& [node, bag] : broken.bags)
        bag.erase(std::remove(bag.begin(), bag.end(), "11"), bag.end());
    CHECK(check_tree_decomposition(g, broken) ==
          "vertex 11 is in no bag");

    TreeDecomposition cut = td;
    cut.tree.edges.pop_back();
    CHECK(check_tree_decomposition(g, cut) == "tree edge count is not #nodes - 1");
}
