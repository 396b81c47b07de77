#include "doctest.h"

#include "../support/generators.hpp"
#include "sgforge/errors.hpp"
#include "sgforge/quality_control.hpp"
#include "sgforge/storyboard_io.hpp"

using namespace sgforge;

namespace {

std::string fixture(const std::string& name) { return gen::read_file(std::string(SGFORGE_FIXTURES) + "/" + name); }

Transition guarded(const char* cond, SceneNum to) { return {parse_condition(cond), to}; }
Transition fallback(SceneNum to) { return {std::nullopt, to}; }

bool has_code(const std::vector<Diagnostic>& diags, std::string_view code) {
    return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.code == code; });
}

std::vector<std::vector<Transition>> transitions_of(const Scenario& s) {
    std::vector<std::vector<Transition>> out;
    for (const auto* scene : s.scenes()) out.push_back(scene->transitions);
    return out;
}

}  // namespace

TEST_CASE("ketteur legacy file") {
    const auto parsed = parse_legacy(fixture("ketteur_storyboard.xml"));
    const auto& scenes = parsed.storyboard.scenes;
    REQUIRE(scenes.size() == 2);

    CHECK(scenes[0].num == 1);
    CHECK(scenes[0].prec == 0);
    CHECK(scenes[0].chemin == "scenes/scene1.swf");
    CHECK(scenes[0].description == "Roland Ketteur devant le BM");
    REQUIRE(scenes[0].transitions.size() == 2);
    CHECK(scenes[0].transitions[0].guard == parse_condition("&score>15"));
    CHECK(scenes[0].transitions[0].guard_text == "&score>15");
    CHECK(scenes[0].transitions[0].target == 2);
    CHECK_FALSE(scenes[0].transitions[1].guard);
    CHECK(scenes[0].transitions[1].target == 1);

    REQUIRE(scenes[1].transitions.size() == 3);
    CHECK(scenes[1].transitions[0].guard == parse_condition("&score<10"));
    CHECK(scenes[1].transitions[0].target == 1);
    CHECK(scenes[1].transitions[1].guard == parse_condition("&score>15"));
    CHECK(scenes[1].transitions[1].target == 3);
    CHECK_FALSE(scenes[1].transitions[2].guard);
    CHECK(scenes[1].transitions[2].target == 2);

    CHECK(has_code(parsed.diagnostics, codes::kMarkupRecovered));
    CHECK_FALSE(has_errors(parsed.diagnostics));

    const auto s = to_scenario(parsed.storyboard);
    CHECK(s.acts.size() == 1);
    CHECK(s.scenes().size() == 2);
    CHECK(s.start_scene() == 1);
    CHECK(s.find_scene(2)->transitions ==
          std::vector<Transition>{guarded("&score<10", 1), guarded("&score>15", 3), fallback(2)});
}

TEST_CASE("empty legacy storyboard") {
    const auto parsed = parse_legacy("<scenes></scenes>");
    CHECK(parsed.storyboard.scenes.empty());
    CHECK(has_code(parsed.diagnostics, codes::kNoStart));
    CHECK_THROWS_AS(to_scenario(parsed.storyboard), DiagnosticError);
}

TEST_CASE("two start scenes") {
    const auto parsed =
        parse_legacy("<scenes><scene num=\"1\" prec=\"0\"/><scene num=\"2\" prec=\"0\"/></scenes>");
    CHECK(has_code(parsed.diagnostics, codes::kMultipleStarts));
    try {
        to_scenario(parsed.storyboard);
        FAIL("expected E004");
    } catch (const DiagnosticError& e) {
        CHECK(e.diagnostic().code == codes::kMultipleStarts);
    }
}

TEST_CASE("legacy schema violations") {
    CHECK_THROWS_AS(parse_legacy("<scenes><scene num=\"x\" prec=\"0\"/></scenes>"), ParseError);
    CHECK_THROWS_AS(parse_legacy("<scenes><scene prec=\"0\"/></scenes>"), ParseError);
    CHECK_THROWS_AS(parse_legacy("<scenes><scene num=\"1\" prec=\"0\" condition1=\"&amp;a&gt;1\"/></scenes>"),
                    ParseError);
    CHECK_THROWS_AS(parse_legacy("<scenes><scene num=\"1\" prec=\"0\" condition1=\"&amp;a&gt;\" suiv1=\"1\" "
                                 "suiv2=\"1\"/></scenes>"),
                    ParseError);
    CHECK_THROWS_AS(parse_legacy("<scenes><scene num=\"1\" prec=\"0\" suiv2=\"1\"/></scenes>"), ParseError);
    CHECK_THROWS_AS(parse_legacy("<scenario id=\"x\"/>"), ParseError);
    CHECK_THROWS_AS(parse_legacy("<scenes><scene num=\"1\" prec=\"0\">"), ParseError);
}

TEST_CASE("legacy unknown markup is preserved with W014") {
    const auto parsed = parse_legacy(
        "<scenes version=\"2\"><scene num=\"1\" prec=\"0\" musique=\"theme.mp3\"><sound/></scene></scenes>");
    CHECK(has_code(parsed.diagnostics, codes::kUnknownMarkup));
    const auto& scene = parsed.storyboard.scenes.at(0);
    CHECK(scene.ext.attributes == std::vector<std::pair<std::string, std::string>>{{"musique", "theme.mp3"}});
    REQUIRE(scene.ext.elements.size() == 1);
    CHECK(scene.ext.elements[0].name == "sound");
}

TEST_CASE("minimal canonical scenario") {
    const auto parsed = parse_scenario(fixture("minimal.xml"));
    CHECK(parsed.diagnostics.empty());
    CHECK(parsed.scenario.id == "minimal");
    CHECK(parsed.scenario.scenes().size() == 1);
    CHECK(parsed.scenario.find_scene(1)->is_terminal());
}

TEST_CASE("dangling activity reference") {
    auto text = fixture("minimal.xml");
    text.replace(text.find("<scene num=\"1\" prec=\"0\"/>"), 25, "<scene num=\"1\" prec=\"0\" activity=\"ghost\"/>");
    const auto parsed = parse_scenario(text);
    CHECK(has_code(parsed.diagnostics, codes::kDanglingActivity));
}

TEST_CASE("canonical ketteur encodes the same graph as the legacy file") {
    const auto legacy = to_scenario(parse_legacy(fixture("ketteur_storyboard.xml")).storyboard);
    auto canonical = parse_scenario(fixture("ketteur_with_scene3.xml")).scenario;
    for (const auto* scene : legacy.scenes()) {
        const auto* other = canonical.find_scene(scene->num);
        REQUIRE(other != nullptr);
        CHECK(other->prec == scene->prec);
        CHECK(other->transitions == scene->transitions);
    }
}

TEST_CASE("canonical schema violations report the element path") {
    try {
        parse_scenario(
            "<scenario id=\"s\"><acts><act id=\"a\" objective=\"o\"><scene num=\"1\" prec=\"0\"/>"
            "<scene num=\"two\" prec=\"1\"/></act></acts></scenario>");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.path() == "/scenario/acts/act[1]/scene[2]");
    }
    CHECK_THROWS_AS(parse_scenario("<scenario id=\"s\"><acts><act id=\"a\" objective=\"o\"><scene num=\"1\" prec=\"0\">"
                                   "<t cond=\"&amp;a&gt;\" to=\"1\"/></scene></act></acts></scenario>"),
                    ParseError);
    CHECK_THROWS_AS(parse_scenario("<scenario id=\"s\" title=\"a & b\"/>"), ParseError);
    CHECK_THROWS_AS(parse_scenario("<scenario/>"), ParseError);
    CHECK_THROWS_AS(parse_scenario(std::string("<scenario id=\"\xff\"/>")), ParseError);
}

TEST_CASE("unknown canonical markup round trips") {
    auto text = fixture("minimal.xml");
    text.replace(text.find("<scene num=\"1\" prec=\"0\"/>"), 25,
                 "<scene num=\"1\" prec=\"0\" x-hint=\"go\"><note lang=\"fr\">texte</note></scene>");
    const auto first = parse_scenario(text);
    CHECK(has_code(first.diagnostics, codes::kUnknownMarkup));
    const auto second = parse_scenario(serialize_scenario(first.scenario));
    CHECK(second.scenario == first.scenario);
}

TEST_CASE("serialization is deterministic and round trips") {
    gen::Rng rng(21);
    for (int i = 0; i < 50; ++i) {
        const auto s = gen::random_rich_scenario(rng, false);
        const auto bytes = serialize_scenario(s);
        CHECK(serialize_scenario(s) == bytes);
        const auto back = parse_scenario(bytes).scenario;
        CHECK(back == s);
        CHECK(serialize_scenario(back) == bytes);
    }
}

TEST_CASE("legacy export and import preserve transitions") {
    gen::Rng rng(22);
    for (int i = 0; i < 50; ++i) {
        const auto s = gen::random_rich_scenario(rng, true);
        const auto back = to_scenario(parse_legacy(export_legacy(s)).storyboard);
        CHECK(transitions_of(back) == transitions_of(s));
    }
}

TEST_CASE("legacy export refuses what it cannot represent") {
    auto s = parse_scenario(fixture("choices.xml")).scenario;
    CHECK_THROWS_AS(export_legacy(s), NotRepresentable);
    s.acts.resize(1);
    for (auto& scene : s.acts[0].scenes) scene.choices.clear();
    CHECK_NOTHROW(export_legacy(s));
    s.acts.push_back(s.acts[0]);
    CHECK_THROWS_AS(export_legacy(s), NotRepresentable);
}

TEST_CASE("ketteur legacy export uses the bare condition attribute for a single guard") {
    const auto s = to_scenario(parse_legacy(fixture("ketteur_storyboard.xml")).storyboard);
    const auto out = export_legacy(s);
    CHECK(out.find("condition=\"&amp;score&gt;15\" suiv1=\"2\" suiv2=\"1\"") != std::string::npos);
    CHECK(out.find("condition1=\"&amp;score&lt;10\" suiv1=\"1\" condition2=\"&amp;score&gt;15\" suiv2=\"3\" suiv3=\"2\"") !=
          std::string::npos);
    const auto again = parse_legacy(out);
    CHECK_FALSE(has_code(again.diagnostics, codes::kMarkupRecovered));
}

TEST_CASE("document sniffing") {
    CHECK(detect_document_kind("<?xml version=\"1.0\"?><!-- <scenario> --><scenes/>") == DocumentKind::Legacy);
    CHECK(detect_document_kind("<scenario id=\"a\"/>") == DocumentKind::Canonical);
    CHECK(detect_document_kind("<catalog/>") == DocumentKind::Unknown);
    CHECK(detect_document_kind("") == DocumentKind::Unknown);
}
