/**
 * @file test_domino.cpp
 * @brief Unit tests for tilesets, the finite solver, pattern compilation,
 *        Wang conversion, seeded composition and the level-set decision
 *        procedure.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <selfsim/contraction.hpp>
#include <selfsim/domino.hpp>
#include <selfsim/schreier.hpp>
#include <selfsim/transducer.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"

using namespace selfsim;

namespace {

Transducer odometer() { return Transducer::from_json(json::parse(fixtures::kOdometer)); }
Transducer hanoi() { return Transducer::from_json(json::parse(fixtures::kHanoi)); }
Transducer longrange() { return Transducer::from_json(json::parse(fixtures::kLongRange)); }

// Swaps the first letter and stops: finite orbits, empty boundary.
const char* kFinitary = R"({
  "alphabet": ["0", "1"],
  "identity": "e",
  "states": [
    {"name": "e", "invertible": true,
     "transitions": {"0": ["0", "e"], "1": ["1", "e"]}},
    {"name": "f", "invertible": true,
     "transitions": {"0": ["1", "e"], "1": ["0", "e"]}}
  ],
  "generators": ["f"]
})";

// Flips every letter forever: exponential activity.
const char* kFlipAll = R"({
  "alphabet": ["0", "1"],
  "identity": "e",
  "states": [
    {"name": "e", "invertible": true,
     "transitions": {"0": ["0", "e"], "1": ["1", "e"]}},
    {"name": "v", "invertible": true,
     "transitions": {"0": ["1", "v"], "1": ["0", "v"]}}
  ],
  "generators": ["v"]
})";

std::vector<std::string> generator_names(const Transducer& t) {
    std::vector<std::string> v;
    for (int g : t.generators) v.push_back(t.states[static_cast<std::size_t>(g)].name);
    return v;
}

// k colours "0".."k-1", every label joins distinct colours.
Tileset proper(const std::vector<std::string>& labels, int k) {
    Tileset ts;
    for (int i = 0; i < k; ++i) ts.colors.push_back(std::to_string(i));
    ts.labels = labels;
    for (const auto& l : labels)
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (i != j)
                    ts.triples.push_back(
                        {std::to_string(i), l, std::to_string(j)});
    ts.sort_canonical();
    ts.validate();
    return ts;
}

LabelledGraph tile_graph_with_identity_loops(const Transducer& nuc, int n) {
    LabelledGraph g = build_graph(nuc, n, GraphKind::Tile);
    std::vector<std::string> vs = g.vertices;
    for (const auto& v : vs) g.edges.push_back({v, "1", v});
    g.sort_canonical();
    return g;
}

// Brute-force level set: one pinned solver run per candidate boundary map.
std::set<std::vector<int>> lambda_oracle(const Transducer& nuc,
                                         const std::vector<PostCriticalWord>& P,
                                         const Tileset& tsc, int n) {
    LabelledGraph g = tile_graph_with_identity_loops(nuc, n);
    auto dset = suffix_set(P, n);
    std::vector<std::vector<int>> dom(dset.begin(), dset.end());
    const int B = static_cast<int>(tsc.colors.size());
    std::set<std::vector<int>> out;
    REQUIRE(B > 0);
    std::vector<int> a(dom.size(), 0);
    while (true) {
        SolveOptions opts;
        for (std::size_t i = 0; i < dom.size(); ++i)
            opts.pins[level_word_id(nuc, dom[i])] =
                tsc.colors[static_cast<std::size_t>(a[i])];
        if (solve_finite(g, tsc, opts).satisfiable) out.insert(a);
        std::size_t k = 0;
        while (k < a.size() && ++a[k] == B) {
            a[k] = 0;
            ++k;
        }
        if (k == a.size()) break;
    }
    return out;
}

std::set<std::vector<int>> lambda_levels(const Transducer& nuc,
                                         const std::vector<PostCriticalWord>& P,
                                         const Tileset& tsc, int n) {
    LambdaSet ls = initial_lambda(tsc);
    for (int i = 0; i < n; ++i) ls = lambda_step(ls, nuc, P, tsc);
    return ls.maps;
}

std::string error_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_CASE("tileset json round trip and validation") {
    json j = json::parse(R"({"colors":["0","1"],"labels":["t"],
        "triples":[["0","t","1"],["1","t","0"]],"seed":"0"})");
    Tileset ts = Tileset::from_json(j);
    CHECK(ts.colors == std::vector<std::string>{"0", "1"});
    CHECK(ts.labels == std::vector<std::string>{"t"});
    CHECK(ts.seed == std::optional<std::string>("0"));
    CHECK(ts.has_triple("0", "t", "1"));
    CHECK_FALSE(ts.has_triple("0", "t", "0"));
    CHECK(ts.color_index("1") == 1);
    CHECK(ts.label_index("u") == -1);
    CHECK(Tileset::from_json(ts.to_json()).to_json() == ts.to_json());

    auto code = [&](const char* txt) {
        return error_code([&] { Tileset::from_json(json::parse(txt)); });
    };
    CHECK(code(R"({"colors":["0"],"labels":["t"],"triples":[["0","t","x"]]})") ==
          "Invalid");
    CHECK(code(R"({"colors":["0"],"labels":["t"],"triples":[["0","u","0"]]})") ==
          "Invalid");
    CHECK(code(R"({"colors":["0","0"],"labels":["t"],"triples":[]})") ==
          "Invalid");
    CHECK(code(R"({"colors":["0"],"labels":["t"],"triples":[],"seed":"9"})") ==
          "Invalid");
}

TEST_CASE("check_coloring on edges, seeds and the triangle") {
    LabelledGraph g;
    g.vertices = {"u", "v"};
    g.edges = {{"u", "t", "v"}};
    Tileset alt = proper({"t"}, 2);
    CHECK(check_coloring(g, alt, {{"u", "0"}, {"v", "1"}}));
    CHECK_FALSE(check_coloring(g, alt, {{"u", "0"}, {"v", "0"}}));
    CHECK_FALSE(check_coloring(g, alt, {{"u", "9"}, {"v", "1"}}));

    Tileset empty;
    empty.colors = {"x"};
    empty.labels = {"t"};
    CHECK_FALSE(check_coloring(g, empty, {{"u", "x"}, {"v", "x"}}));

    Tileset seeded = alt;
    seeded.seed = "0";
    LabelledGraph rooted = g;
    rooted.root = "u";
    CHECK(check_coloring(rooted, seeded, {{"u", "0"}, {"v", "1"}}));
    CHECK_FALSE(check_coloring(rooted, seeded, {{"u", "1"}, {"v", "0"}}));

    CHECK(error_code([&] { check_coloring(g, alt, {{"u", "0"}}); }) ==
          "MissingColour");

    auto nuc = *nucleus(hanoi()).machine;
    LabelledGraph tri = build_graph(nuc, 1, GraphKind::Tile);
    Tileset p3 = proper(generator_names(nuc), 3);
    CHECK(check_coloring(tri, p3, {{"0", "0"}, {"1", "1"}, {"2", "2"}}));
    CHECK_FALSE(check_coloring(tri, p3, {{"0", "0"}, {"1", "0"}, {"2", "2"}}));
}

TEST_CASE("solver: propagation, pins, loops and determinism") {
    LabelledGraph tri;
    tri.vertices = {"a", "b", "c"};
    tri.edges = {{"a", "t", "b"}, {"b", "t", "c"}, {"c", "t", "a"}};

    CHECK_FALSE(solve_finite(tri, proper({"t"}, 2)).satisfiable);

    auto r3 = solve_finite(tri, proper({"t"}, 3));
    REQUIRE(r3.satisfiable);
    CHECK(r3.coloring ==
          std::map<std::string, std::string>{{"a", "0"}, {"b", "1"}, {"c", "2"}});
    CHECK(check_coloring(tri, proper({"t"}, 3), r3.coloring));

    SolveOptions pin;
    pin.pins = {{"b", "0"}};
    auto rp = solve_finite(tri, proper({"t"}, 3), pin);
    REQUIRE(rp.satisfiable);
    CHECK(rp.coloring ==
          std::map<std::string, std::string>{{"a", "1"}, {"b", "0"}, {"c", "2"}});

    SolveOptions clash;
    clash.pins = {{"a", "0"}, {"b", "0"}};
    CHECK_FALSE(solve_finite(tri, proper({"t"}, 3), clash).satisfiable);

    Tileset one;
    one.colors = {"x"};
    one.labels = {"t"};
    one.triples = {{"x", "t", "x"}};
    auto r1 = solve_finite(tri, one);
    REQUIRE(r1.satisfiable);
    CHECK(r1.coloring.at("a") == "x");

    // loop edges keep exactly the diagonal triples
    LabelledGraph lg;
    lg.vertices = {"v"};
    lg.edges = {{"v", "t", "v"}};
    CHECK_FALSE(solve_finite(lg, proper({"t"}, 2)).satisfiable);
    Tileset withdiag = proper({"t"}, 2);
    withdiag.triples.push_back({"1", "t", "1"});
    withdiag.sort_canonical();
    auto rl = solve_finite(lg, withdiag);
    REQUIRE(rl.satisfiable);
    CHECK(rl.coloring.at("v") == "1");

    CHECK(error_code([&] { solve_finite(tri, proper({"u"}, 2)); }) ==
          "UnknownLabel");
    SolveOptions badpin;
    badpin.pins = {{"zz", "0"}};
    CHECK(error_code([&] { solve_finite(tri, proper({"t"}, 2), badpin); }) ==
          "Invalid");

    // seeded tileset pins the root
    Tileset seeded = proper({"t"}, 3);
    seeded.seed = "2";
    LabelledGraph rooted = tri;
    rooted.root = "a";
    auto rs = solve_finite(rooted, seeded);
    REQUIRE(rs.satisfiable);
    CHECK(rs.coloring.at("a") == "2");

    // byte determinism
    auto again = solve_finite(tri, proper({"t"}, 3));
    CHECK(again.coloring == r3.coloring);
}

TEST_CASE("solver: All mode matches exhaustive filtering") {
    LabelledGraph path;
    path.vertices = {"u", "v", "w"};
    path.edges = {{"u", "t", "v"}, {"v", "t", "w"}};
    Tileset alt = proper({"t"}, 2);

    SolveOptions all;
    all.mode = SolveMode::All;
    auto ra = solve_finite(path, alt, all);
    REQUIRE(ra.satisfiable);
    CHECK_FALSE(ra.capped);

    std::set<std::map<std::string, std::string>> brute;
    for (int mask = 0; mask < 8; ++mask) {
        std::map<std::string, std::string> c = {
            {"u", std::to_string(mask & 1)},
            {"v", std::to_string((mask >> 1) & 1)},
            {"w", std::to_string((mask >> 2) & 1)}};
        if (check_coloring(path, alt, c)) brute.insert(c);
    }
    std::set<std::map<std::string, std::string>> got(ra.solutions.begin(),
                                                     ra.solutions.end());
    CHECK(got == brute);
    CHECK(ra.solutions.size() == 2);
    CHECK(ra.coloring == *std::min_element(ra.solutions.begin(), ra.solutions.end()));

    SolveOptions capped;
    capped.mode = SolveMode::All;
    capped.max_solutions = 1;
    auto rc = solve_finite(path, alt, capped);
    CHECK(rc.capped);
    CHECK(rc.solutions.size() == 1);
}

TEST_CASE("level sets: frozen examples and domain checks") {
    auto nuc = *nucleus(odometer()).machine;
    auto P = post_critical_set(nuc);
    auto labs = generator_names(nuc);
    labs.push_back("1");

    Tileset tsc = complete_tileset(proper(generator_names(nuc), 2), labs);
    LambdaSet ls = initial_lambda(tsc);
    CHECK(ls.level == 0);
    CHECK(ls.maps == std::set<std::vector<int>>{{0}, {1}});
    for (int n = 1; n <= 5; ++n) {
        ls = lambda_step(ls, nuc, P, tsc);
        CHECK(ls.level == n);
        REQUIRE(ls.domain.size() == 2);  // all-zero word and all-one word
        CHECK(ls.maps == std::set<std::vector<int>>{{0, 1}, {1, 0}});
    }

    // no generator triples at all: the first glued level dies
    Tileset bare;
    bare.colors = {"0", "1"};
    bare.labels = generator_names(nuc);
    Tileset barec = complete_tileset(bare, labs);
    LambdaSet l0 = initial_lambda(barec);
    CHECK(l0.maps.size() == 2);
    CHECK(lambda_step(l0, nuc, P, barec).maps.empty());

    // one colour, everything allowed: a single constant map forever
    Tileset onec = complete_tileset(Tileset{{"x"}, {}, {}, std::nullopt}, labs);
    LambdaSet lc = initial_lambda(onec);
    for (int n = 1; n <= 4; ++n) {
        lc = lambda_step(lc, nuc, P, onec);
        CHECK(lc.maps.size() == 1);
    }

    LambdaSet wrong = initial_lambda(tsc);
    wrong.domain[0] = {0};
    CHECK(error_code([&] { lambda_step(wrong, nuc, P, tsc); }) ==
          "DomainMismatch");
    CHECK(error_code([&] { initial_lambda(proper({"t"}, 2)); }) ==
          "UnknownLabel");
}

TEST_CASE("level sets equal brute force: odometer exhaustive |B| <= 2") {
    auto nuc = *nucleus(odometer()).machine;
    auto P = post_critical_set(nuc);
    auto gens = generator_names(nuc);
    auto labs = gens;
    labs.push_back("1");

    for (int B = 1; B <= 2; ++B) {
        std::vector<std::array<std::string, 3>> all;
        for (int i = 0; i < B; ++i)
            for (const auto& l : gens)
                for (int j = 0; j < B; ++j)
                    all.push_back({std::to_string(i), l, std::to_string(j)});
        REQUIRE(all.size() <= 8);
        for (std::size_t mask = 0; mask < (std::size_t{1} << all.size()); ++mask) {
            Tileset ts;
            for (int i = 0; i < B; ++i) ts.colors.push_back(std::to_string(i));
            ts.labels = gens;
            for (std::size_t b = 0; b < all.size(); ++b)
                if (mask & (std::size_t{1} << b)) ts.triples.push_back(all[b]);
            Tileset tsc = complete_tileset(ts, labs);
            for (int n = 0; n <= 3; ++n) {
                auto fast = lambda_levels(nuc, P, tsc, n);
                auto slow = lambda_oracle(nuc, P, tsc, n);
                REQUIRE(fast == slow);
                if (fast.empty()) break;  // stays empty at deeper levels
            }
        }
    }
}

TEST_CASE("level sets equal brute force: hanoi sampled") {
    auto nuc = *nucleus(hanoi()).machine;
    auto P = post_critical_set(nuc);
    auto gens = generator_names(nuc);
    auto labs = gens;
    labs.push_back("1");

    std::vector<Tileset> sample;
    // exhaustive one-colour tilesets
    for (int mask = 0; mask < 8; ++mask) {
        Tileset ts;
        ts.colors = {"0"};
        ts.labels = gens;
        for (int b = 0; b < 3; ++b)
            if (mask & (1 << b)) ts.triples.push_back({"0", gens[static_cast<std::size_t>(b)], "0"});
        sample.push_back(ts);
    }
    // random two-colour tilesets
    std::mt19937 rng(12345);
    for (int k = 0; k < 40; ++k) {
        Tileset ts;
        ts.colors = {"0", "1"};
        ts.labels = gens;
        for (const auto& l : gens)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    if (rng() % 2)
                        ts.triples.push_back(
                            {std::to_string(i), l, std::to_string(j)});
        sample.push_back(ts);
    }
    sample.push_back(proper(gens, 2));
    sample.push_back(proper(gens, 3));

    for (const auto& ts : sample) {
        Tileset tsc = complete_tileset(ts, labs);
        for (int n = 0; n <= 3; ++n) {
            auto fast = lambda_levels(nuc, P, tsc, n);
            auto slow = lambda_oracle(nuc, P, tsc, n);
            REQUIRE(fast == slow);
            if (fast.empty()) break;
        }
    }
}

TEST_CASE("level sets: a declared identity label constrains every vertex") {
    auto nuc = *nucleus(odometer()).machine;
    auto P = post_critical_set(nuc);
    auto gens = generator_names(nuc);

    Tileset ts;
    ts.colors = {"0", "1"};
    ts.labels = {"1"};
    ts.triples = {{"0", "1", "0"}};  // colour 1 never sits on an identity loop
    Tileset tsc = complete_tileset(ts, gens);
    tsc = complete_tileset(tsc, {"1"});

    CHECK(initial_lambda(tsc).maps == std::set<std::vector<int>>{{0}});
    for (int n = 1; n <= 3; ++n) {
        auto fast = lambda_levels(nuc, P, tsc, n);
        auto slow = lambda_oracle(nuc, P, tsc, n);
        CHECK(fast == slow);
        CHECK(fast == std::set<std::vector<int>>{{0, 0}});
    }
}

TEST_CASE("decide: hanoi proper-2 empties at level 1") {
    Ray zero{{}, {0}};
    Decision d = decide_pcf(hanoi(), proper({"a", "b", "c"}, 2), zero);
    CHECK(d.verdict == "not_tileable");
    CHECK(d.witness.at("empty_level") == 1);
    CHECK(d.witness.at("singular") == true);

    // consequence: the level-1 tile graph itself is unsolvable
    auto nuc = *nucleus(hanoi()).machine;
    auto labs = generator_names(nuc);
    labs.push_back("1");
    Tileset tsc = complete_tileset(proper(generator_names(nuc), 2), labs);
    CHECK_FALSE(
        solve_finite(tile_graph_with_identity_loops(nuc, 1), tsc).satisfiable);
}

TEST_CASE("decide: hanoi proper-3 tileable along a regular ray") {
    Ray reg{{}, {0, 1}};
    Tileset p3 = proper({"a", "b", "c"}, 3);
    Decision d = decide_pcf(hanoi(), p3, reg);
    CHECK(d.verdict == "tileable");
    CHECK(d.witness.at("singular") == false);
    CHECK(d.witness.at("cycle_length").get<int>() >= 1);
    CHECK(d.witness.contains("cycle"));

    // monotone consequence: every tested level is solvable
    auto nuc = *nucleus(hanoi()).machine;
    auto labs = generator_names(nuc);
    labs.push_back("1");
    Tileset tsc = complete_tileset(p3, labs);
    for (int n = 1; n <= 3; ++n)
        CHECK(solve_finite(tile_graph_with_identity_loops(nuc, n), tsc).satisfiable);

    Decision d2 = decide_pcf(hanoi(), p3, reg);
    CHECK(d.to_json().dump() == d2.to_json().dump());
}

TEST_CASE("decide: hanoi proper-3 fails on the singular ray") {
    Ray zero{{}, {0}};
    Decision d = decide_pcf(hanoi(), proper({"a", "b", "c"}, 3), zero);
    CHECK(d.verdict == "not_tileable");
    CHECK(d.witness.at("singular") == true);
    REQUIRE(d.witness.contains("singular_level"));
    std::vector<std::string> gs =
        d.witness.at("loop_generators").get<std::vector<std::string>>();
    CHECK(std::find(gs.begin(), gs.end(), "c") != gs.end());

    // oracle: the radius-1 ball around the ray carries the fixing loop
    auto nuc = *nucleus(hanoi()).machine;
    LabelledGraph ball = ball_around_ray(nuc, zero, 1);
    std::vector<std::string> vs = ball.vertices;
    for (const auto& v : vs) ball.edges.push_back({v, "1", v});
    ball.sort_canonical();
    auto labs = generator_names(nuc);
    labs.push_back("1");
    Tileset tsc = complete_tileset(proper(generator_names(nuc), 3), labs);
    CHECK_FALSE(solve_finite(ball, tsc).satisfiable);
}

TEST_CASE("decide: odometer proper-2 passes the singular check") {
    Tileset p2 = proper({"t", "t^-1"}, 2);
    Decision d0 = decide_pcf(odometer(), p2, Ray{{}, {0}});
    CHECK(d0.verdict == "tileable");
    CHECK(d0.witness.at("singular") == true);
    CHECK(d0.witness.at("ell") == 1);
    CHECK(d0.witness.at("cycle_length").get<int>() >= 1);

    Decision d1 = decide_pcf(odometer(), p2, Ray{{}, {1}});
    CHECK(d1.verdict == "tileable");
    CHECK(d1.witness.at("singular") == true);

    Decision dreg = decide_pcf(odometer(), p2, Ray{{}, {0, 1}});
    CHECK(dreg.verdict == "tileable");
    CHECK(dreg.witness.at("singular") == false);

    Decision dpre = decide_pcf(odometer(), p2, Ray{{1}, {0}});
    CHECK(dpre.verdict == "tileable");
    CHECK(dpre.witness.at("dropped_preperiod") == 1);

    Decision d0b = decide_pcf(odometer(), p2, Ray{{}, {0}});
    CHECK(d0.to_json().dump() == d0b.to_json().dump());
}

TEST_CASE("decide: caps, unbounded machines and bad rays") {
    Tileset p2 = proper({"t", "t^-1"}, 2);
    Decision d = decide_pcf(odometer(), p2, Ray{{}, {0}}, 10000, 0);
    CHECK(d.verdict == "inconclusive");
    CHECK(d.witness.at("cap") == 0);

    CHECK(error_code([&] {
              decide_pcf(longrange(), proper({"t", "u"}, 2), Ray{{}, {0}});
          }) == "NotContractingUpToBound");
    CHECK(error_code([&] {
              decide_pcf(Transducer::from_json(json::parse(kFlipAll)),
                         proper({"v"}, 2), Ray{{}, {0}});
          }) == "NotBounded");
    CHECK(error_code([&] {
              decide_pcf(odometer(), p2, Ray{{}, {2}});
          }) == "Invalid");
}

TEST_CASE("decide: finite orbits are solved directly") {
    Transducer fin = Transducer::from_json(json::parse(kFinitary));
    Decision d = decide_pcf(fin, proper({"f"}, 2), Ray{{}, {0}});
    CHECK(d.verdict == "tileable");
    CHECK(d.witness.at("finite_orbit") == true);
    CHECK(d.witness.at("orbit_size") == 2);

    Tileset blocked;
    blocked.colors = {"0"};
    blocked.labels = {"f"};
    Decision d2 = decide_pcf(fin, blocked, Ray{{}, {0}});
    CHECK(d2.verdict == "not_tileable");
    CHECK(d2.witness.at("finite_orbit") == true);
}

TEST_CASE("compile: a single forbidden triple equals the complement tileset") {
    PatternSet ps;
    ps.colors = {"0", "1"};
    ps.radius = 1;
    ps.patterns = {{{"", "0"}, {"t", "1"}}};
    auto [compiled, proj] = compile_patterns(ps);

    Tileset direct;
    direct.colors = {"0", "1"};
    direct.labels = {"t"};
    for (const auto& i : {"0", "1"})
        for (const auto& j : {"0", "1"})
            if (!(std::string(i) == "0" && std::string(j) == "1"))
                direct.triples.push_back({i, "t", j});

    LabelledGraph g = build_graph(odometer(), 3, GraphKind::Full);
    Tileset cc = complete_tileset(compiled, {"t", "t^-1"});
    Tileset dc = complete_tileset(direct, {"t", "t^-1"});
    SolveOptions all;
    all.mode = SolveMode::All;
    auto rc = solve_finite(g, cc, all);
    auto rd = solve_finite(g, dc, all);
    std::set<std::map<std::string, std::string>> projset;
    for (const auto& sol : rc.solutions) {
        std::map<std::string, std::string> p;
        for (const auto& [v, c] : sol) p[v] = proj.at(c);
        projset.insert(p);
    }
    std::set<std::map<std::string, std::string>> directset(rd.solutions.begin(),
                                                           rd.solutions.end());
    CHECK(projset == directset);
    CHECK(rc.solutions.size() == rd.solutions.size());  // ball covered by cycle
}

TEST_CASE("compile: empty pattern set allows every colouring") {
    PatternSet ps;
    ps.colors = {"0", "1"};
    ps.radius = 1;
    auto [compiled, proj] = compile_patterns(ps);
    CHECK(compiled.labels.empty());
    CHECK(compiled.colors.size() == 2);

    LabelledGraph path;
    path.vertices = {"u", "v"};
    path.edges = {{"u", "t", "v"}};
    Tileset cc = complete_tileset(compiled, {"t"});
    SolveOptions all;
    all.mode = SolveMode::All;
    CHECK(solve_finite(path, cc, all).solutions.size() == 4);
}

TEST_CASE("compile: radius-2 round trip on balls") {
    PatternSet ps;
    ps.colors = {"0", "1"};
    ps.radius = 2;
    ps.patterns = {{{"", "1"}, {"t t", "1"}}};
    auto [compiled, proj] = compile_patterns(ps);

    auto roundtrip = [&](const LabelledGraph& g,
                         const std::vector<std::string>& labels,
                         bool closed) {
        Tileset cc = complete_tileset(compiled, labels);
        SolveOptions all;
        all.mode = SolveMode::All;
        auto rc = solve_finite(g, cc, all);
        REQUIRE_FALSE(rc.capped);
        std::set<std::map<std::string, std::string>> projset;
        for (const auto& sol : rc.solutions) {
            std::map<std::string, std::string> p;
            for (const auto& [v, c] : sol) p[v] = proj.at(c);
            projset.insert(p);
        }
        // direct enumeration of pattern-avoiding colourings
        std::set<std::map<std::string, std::string>> direct;
        const auto& vs = g.vertices;
        REQUIRE(vs.size() <= 12);
        for (std::size_t mask = 0; mask < (std::size_t{1} << vs.size()); ++mask) {
            std::map<std::string, std::string> c;
            for (std::size_t i = 0; i < vs.size(); ++i)
                c[vs[i]] = (mask >> i) & 1 ? "1" : "0";
            if (check_patterns(g, ps, c)) direct.insert(c);
        }
        CHECK(projset == direct);
        if (closed) CHECK(rc.solutions.size() == direct.size());
    };

    LabelledGraph oball = ball_around_ray(odometer(), Ray{{}, {0}}, 3);
    roundtrip(oball, {"t"}, false);
    LabelledGraph hball = ball_around_ray(hanoi(), Ray{{}, {0}}, 2);
    PatternSet hps;
    hps.colors = {"0", "1"};
    hps.radius = 2;
    hps.patterns = {{{"", "1"}, {"a", "1"}}};
    auto [hcompiled, hproj] = compile_patterns(hps);
    {
        Tileset cc = complete_tileset(hcompiled, {"a", "b", "c"});
        SolveOptions all;
        all.mode = SolveMode::All;
        auto rc = solve_finite(hball, cc, all);
        std::set<std::map<std::string, std::string>> projset;
        for (const auto& sol : rc.solutions) {
            std::map<std::string, std::string> p;
            for (const auto& [v, c] : sol) p[v] = hproj.at(c);
            projset.insert(p);
        }
        std::set<std::map<std::string, std::string>> direct;
        const auto& vs = hball.vertices;
        REQUIRE(vs.size() <= 12);
        for (std::size_t mask = 0; mask < (std::size_t{1} << vs.size()); ++mask) {
            std::map<std::string, std::string> c;
            for (std::size_t i = 0; i < vs.size(); ++i)
                c[vs[i]] = (mask >> i) & 1 ? "1" : "0";
            if (check_patterns(hball, hps, c)) direct.insert(c);
        }
        CHECK(projset == direct);
    }

    // closed graph fully covered by the ball: a genuine bijection
    LabelledGraph cyc = build_graph(odometer(), 2, GraphKind::Full);
    roundtrip(cyc, {"t", "t^-1"}, true);

    CHECK(error_code([&] {
              PatternSet big;
              big.colors = {"0", "1", "2"};
              big.radius = 3;
              big.patterns = {{{"a", "0"}, {"b", "0"}, {"c", "0"}}};
              compile_patterns(big);
          }) == "CapExceeded");
}

TEST_CASE("wang tiles: conversion and torus solving") {
    auto tiles = wang_tiles_from_json(json::parse(
        R"([{"n":"x","e":"x","s":"x","w":"x"}])"));
    REQUIRE(tiles.size() == 1);
    CHECK(tiles[0].name == "t0");
    Tileset uni = wang_to_tileset(tiles);
    CHECK(uni.labels ==
          std::vector<std::string>{"(1,0)", "(-1,0)", "(0,1)", "(0,-1)"});

    LabelledGraph torus;
    torus.vertices = {"00", "01", "10", "11"};
    torus.edges = {{"00", "(1,0)", "10"}, {"10", "(1,0)", "00"},
                   {"01", "(1,0)", "11"}, {"11", "(1,0)", "01"},
                   {"00", "(0,1)", "01"}, {"01", "(0,1)", "00"},
                   {"10", "(0,1)", "11"}, {"11", "(0,1)", "10"}};
    CHECK(solve_finite(torus, uni).satisfiable);

    auto cb = wang_tiles_from_json(json::parse(R"([
        {"name":"w0","n":"p","e":"a","s":"q","w":"b"},
        {"name":"w1","n":"q","e":"b","s":"p","w":"a"}])"));
    Tileset cbs = wang_to_tileset(cb);
    auto r = solve_finite(torus, cbs);
    REQUIRE(r.satisfiable);
    CHECK(check_coloring(torus, cbs, r.coloring));
    CHECK(r.coloring.at("00") != r.coloring.at("10"));
    CHECK(r.coloring.at("00") != r.coloring.at("01"));
    CHECK(r.coloring.at("00") == r.coloring.at("11"));

    auto nomatch = wang_tiles_from_json(json::parse(R"([
        {"n":"a","e":"a","s":"a","w":"b"}])"));
    LabelledGraph pair;
    pair.vertices = {"u", "v"};
    pair.edges = {{"u", "(1,0)", "v"}};
    CHECK_FALSE(solve_finite(pair, wang_to_tileset(nomatch)).satisfiable);
}

TEST_CASE("compose_seeded: arithmetic, implication and trivial projection") {
    Tileset main;
    main.colors = {"A", "B"};
    main.labels = {"t"};
    main.triples = {{"A", "t", "B"}, {"B", "t", "A"}};
    main.seed = "A";
    Tileset ssu;
    ssu.colors = {"m0", "m1"};
    ssu.labels = {"t"};
    ssu.triples = {{"m0", "t", "m0"}, {"m0", "t", "m1"}, {"m1", "t", "m0"}};
    std::map<std::string, std::string> proj = {{"m0", "0"}, {"m1", "1"}};

    Tileset comp = compose_seeded(main, ssu, proj);
    CHECK(comp.colors ==
          std::vector<std::string>{"A|m0", "A|m1", "B|m0"});
    CHECK_FALSE(comp.seed.has_value());
    CHECK(comp.has_triple("A|m0", "t", "B|m0"));
    CHECK(comp.has_triple("A|m1", "t", "B|m0"));
    CHECK(comp.has_triple("B|m0", "t", "A|m1"));
    CHECK_FALSE(comp.has_triple("A|m0", "t", "A|m1"));  // main forbids A->A

    // constant-0 projection: composing changes nothing but the colour names
    std::map<std::string, std::string> zero = {{"m0", "0"}, {"m1", "0"}};
    Tileset comp0 = compose_seeded(main, ssu, zero);
    CHECK(comp0.colors.size() == 4);
    LabelledGraph path;
    path.vertices = {"u", "v", "w"};
    path.edges = {{"u", "t", "v"}, {"v", "t", "w"}};
    Tileset unseeded = main;
    unseeded.seed.reset();
    SolveOptions all;
    all.mode = SolveMode::All;
    auto rc = solve_finite(path, comp0, all);
    auto rm = solve_finite(path, unseeded, all);
    auto rs = solve_finite(path, ssu, all);
    CHECK(rc.solutions.size() == rm.solutions.size() * rs.solutions.size());

    CHECK(error_code([&] { compose_seeded(unseeded, ssu, proj); }) == "Invalid");
    CHECK(error_code([&] {
              compose_seeded(main, ssu, {{"m0", "0"}});
          }) == "Invalid");
    CHECK(error_code([&] {
              compose_seeded(main, ssu, {{"m0", "0"}, {"m1", "x"}});
          }) == "Invalid");
}

TEST_CASE("local mark: loops force the marked colour") {
    auto [lm, marked] = local_mark_tileset("u");
    CHECK(marked == std::vector<std::string>{"0"});
    CHECK(lm.colors == std::vector<std::string>{"0", "1", "2", "3"});
    CHECK(lm.triples.size() == 7);

    // a loop-free cycle can avoid marks entirely
    LabelledGraph cyc;
    cyc.vertices = {"a", "b", "c"};
    cyc.edges = {{"a", "u", "b"}, {"b", "u", "c"}, {"c", "u", "a"}};
    CHECK(check_coloring(cyc, lm, {{"a", "1"}, {"b", "2"}, {"c", "3"}}));
    CHECK(solve_finite(cyc, lm).satisfiable);

    // the long-range ball has its unique loop at the ray vertex
    LabelledGraph ball = ball_around_ray(longrange(), Ray{{}, {0}}, 2);
    std::string center;
    int loops = 0;
    for (const auto& e : ball.edges)
        if (e[0] == e[2]) {
            ++loops;
            center = e[0];
        }
    REQUIRE(loops == 1);
    Tileset lmc = complete_tileset(lm, {"t", "u"});
    SolveOptions ok;
    ok.pins = {{center, "0"}};
    CHECK(solve_finite(ball, lmc, ok).satisfiable);
    for (const auto& c : {"1", "2", "3"}) {
        SolveOptions bad;
        bad.pins = {{center, c}};
        CHECK_FALSE(solve_finite(ball, lmc, bad).satisfiable);
    }
}

TEST_CASE("complete_tileset preserves declared labels") {
    Tileset ts;
    ts.colors = {"x", "y"};
    ts.labels = {"t"};
    ts.triples = {{"x", "t", "y"}};
    Tileset c = complete_tileset(ts, {"t", "u"});
    CHECK(c.labels == std::vector<std::string>{"t", "u"});
    int tcount = 0, ucount = 0;
    for (const auto& tr : c.triples) {
        if (tr[1] == "t") ++tcount;
        if (tr[1] == "u") ++ucount;
    }
    CHECK(tcount == 1);
    CHECK(ucount == 4);
}
