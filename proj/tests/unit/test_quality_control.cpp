#include "doctest.h"

#include "../support/generators.hpp"
#include "sgforge/quality_control.hpp"
#include "sgforge/storyboard_io.hpp"

using namespace sgforge;

namespace {

std::string fixture(const std::string& name) { return gen::read_file(std::string(SGFORGE_FIXTURES) + "/" + name); }
Scenario load(const std::string& name) { return parse_scenario(fixture(name)).scenario; }

std::vector<std::string> codes_of(const std::vector<Diagnostic>& diags) {
    std::vector<std::string> out;
    for (const auto& d : diags) out.push_back(d.code);
    return out;
}

std::size_t live_edges(const SceneGraph& g) {
    return static_cast<std::size_t>(std::count_if(g.edges.begin(), g.edges.end(), [](const auto& e) { return !e.pruned; }));
}

}  // namespace

TEST_CASE("ketteur with a terminal scene 3") {
    const auto s = load("ketteur_with_scene3.xml");
    const auto g = build_graph(s);
    CHECK(g.nodes == std::vector<SceneNum>{1, 2, 3});
    CHECK(g.edges.size() == 5);
    CHECK(live_edges(g) == 5);
    CHECK(g.terminals == std::set<SceneNum>{3});
    CHECK(find_unreachable(g).empty());
    CHECK(find_dead_ends(g).empty());
    CHECK(g.successors(2) == std::vector<SceneNum>{1, 3, 2});
}

TEST_CASE("single terminal scene") {
    const auto g = build_graph(load("minimal.xml"));
    CHECK(g.nodes.size() == 1);
    CHECK(g.edges.empty());
    CHECK(g.terminals == std::set<SceneNum>{1});
    const auto paths = enumerate_paths(g);
    CHECK(paths.paths == std::vector<std::vector<SceneNum>>{{1}});
}

TEST_CASE("unreachable scene and pruned guard") {
    const auto s = load("unreachable.xml");
    const auto g = build_graph(s);
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].pruned);
    CHECK_FALSE(g.edges[1].pruned);
    CHECK(find_unreachable(g) == std::set<SceneNum>{2, 4});
    const auto diags = check_graph(g);
    CHECK(codes_of(diags) == std::vector<std::string>{"E006", "W006"});
    CHECK(diags[0].scene == 4);
    CHECK(diags[1].scene == 2);
}

TEST_CASE("dead ends") {
    const auto result = validate_scenario(load("dead_end.xml"));
    CHECK(find_dead_ends(*result.graph) == std::set<SceneNum>{1, 2});
    CHECK(find_unreachable(*result.graph) == std::set<SceneNum>{3});
    CHECK(codes_of(result.diagnostics) == std::vector<std::string>{"E006", "E007", "E007", "W012"});
}

TEST_CASE("ketteur fragment stops at the structural error") {
    const auto s = to_scenario(parse_legacy(fixture("ketteur_storyboard.xml")).storyboard);
    const auto result = validate_scenario(s);
    CHECK_FALSE(result.graph);
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].code == "E002");
    CHECK(result.diagnostics[0].scene == 2);
}

TEST_CASE("path enumeration on a chain and a diamond") {
    auto s = gen::base_scenario();
    Act act{"a", "o", {}, {}};
    for (SceneNum n = 1; n <= 3; ++n) {
        Scene scene;
        scene.num = n;
        scene.prec = n - 1;
        if (n < 3) scene.transitions.push_back({std::nullopt, n + 1});
        act.scenes.push_back(scene);
    }
    s.acts = {act};
    CHECK(enumerate_paths(build_graph(s)).paths == std::vector<std::vector<SceneNum>>{{1, 2, 3}});

    s.acts[0].scenes[0].transitions.clear();
    s.acts[0].scenes[0].choices = {2, 3};
    s.acts[0].scenes[2].prec = 1;
    const auto report = enumerate_paths(build_graph(s));
    CHECK(report.paths == std::vector<std::vector<SceneNum>>{{1, 2, 3}, {1, 3}});
    CHECK_FALSE(report.truncated);
}

TEST_CASE("cycle unrolling and truncation") {
    const auto g = build_graph(load("ketteur_with_scene3.xml"));
    CHECK(enumerate_paths(g, {10000, 0}).paths == std::vector<std::vector<SceneNum>>{{1, 2, 3}});
    const auto one = enumerate_paths(g, {10000, 1});
    CHECK(one.paths.size() == 5);
    CHECK_FALSE(one.truncated);
    const auto capped = enumerate_paths(g, {2, 1});
    CHECK(capped.paths.size() == 2);
    CHECK(capped.truncated);
}

TEST_CASE("coverage verdicts") {
    CHECK(codes_of(validate_scenario(load("coverage_warning.xml")).diagnostics) == std::vector<std::string>{"W015"});
    CHECK(codes_of(validate_scenario(load("coverage_error.xml")).diagnostics) == std::vector<std::string>{"E011"});
    CHECK(codes_of(validate_scenario(load("gate.xml")).diagnostics) == std::vector<std::string>{"W015"});
    CHECK(validate_scenario(load("minimal.xml")).diagnostics.empty());
}

TEST_CASE("score mechanisms fold along a path") {
    auto s = load("coverage_warning.xml");
    s.acts[0].scenes[1].activity_id = "crossword";
    const std::vector<SceneNum> path{1, 2};
    CHECK(score_path(s, path).at("o") == ObjectiveBounds{Decimal::from_int(20), Decimal::from_int(40)});
    s.learner_profile.score_mechanism["o"] = ScoreMechanism::Max;
    CHECK(score_path(s, path).at("o") == ObjectiveBounds{Decimal::from_int(10), Decimal::from_int(20)});
    s.learner_profile.score_mechanism["o"] = ScoreMechanism::Last;
    CHECK(score_path(s, path).at("o") == ObjectiveBounds{Decimal::from_int(10), Decimal::from_int(20)});
}

TEST_CASE("guard sanity") {
    const auto diags = check_guard_sanity(load("guards.xml"));
    REQUIRE(codes_of(diags) == std::vector<std::string>{"E009", "W010"});
    CHECK(diags[0].scene == 1);
    CHECK(diags[1].scene == 1);
    CHECK(diags[1].message.find("&score>7") != std::string::npos);
}

TEST_CASE("ketteur scene 2 guards overlap nothing") {
    CHECK(check_guard_sanity(load("ketteur_with_scene3.xml")).empty());
}

TEST_CASE("choices scenario only warns about history") {
    const auto result = validate_scenario(load("choices.xml"));
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].code == "W015");
    CHECK(result.diagnostics[0].message.find("history") != std::string::npos);
}

TEST_CASE("graph analyses agree with the oracle on small graphs") {
    gen::Rng rng(31);
    for (int i = 0; i < 100; ++i) {
        const auto c = gen::random_graph_case(rng, {6, 3, false, 0, 20});
        REQUIRE_FALSE(has_errors(check_structure(c.scenario)));
        const auto g = build_graph(c.scenario);
        CHECK(find_unreachable(g) == oracle::unreachable(c.graph));
        const auto dead = oracle::dead_ends(c.graph);
        CHECK(find_dead_ends(g) == dead);
        if (dead.empty()) {
            const auto expected = oracle::paths(c.graph, 1, 100000);
            const auto actual = enumerate_paths(g, {100000, 1});
            CHECK(std::set<std::vector<SceneNum>>(actual.paths.begin(), actual.paths.end()) == expected.paths);
            CHECK(actual.paths.size() == expected.paths.size());
        }
    }
}
