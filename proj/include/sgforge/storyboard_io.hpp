#pragma once

// Readers and writers for the two storyboard dialects.
//
// Legacy dialect: root <scenes>, one <scene> per storyboard scene with
// attributes num, prec, chemin, description and an ordered guard chain
// conditionK/suivK (a bare `condition` is condition1). The highest suivK
// without a matching conditionK is the fallback.
//
// Canonical dialect: root <scenario>; see docs/formats.md.

#include <string>
#include <string_view>
#include <vector>

#include "sgforge/diagnostics.hpp"
#include "sgforge/scenario.hpp"

namespace sgforge {

struct LegacyTransition {
    /// Guard text as written in the file (entity-decoded).
    std::optional<std::string> guard_text;
    std::optional<Condition> guard;
    SceneNum target = 0;

    friend bool operator==(const LegacyTransition&, const LegacyTransition&) = default;
};

struct LegacyScene {
    SceneNum num = 0;
    SceneNum prec = 0;
    std::string chemin;
    std::string description;
    std::vector<LegacyTransition> transitions;
    Extensions ext;

    friend bool operator==(const LegacyScene&, const LegacyScene&) = default;
};

struct LegacyStoryboard {
    std::vector<LegacyScene> scenes;
    Extensions ext;

    friend bool operator==(const LegacyStoryboard&, const LegacyStoryboard&) = default;
};

struct LegacyParseResult {
    LegacyStoryboard storyboard;
    /// E003/E004 for start-scene problems, W014 for unknown markup, W016 for
    /// recovered malformed markup.
    std::vector<Diagnostic> diagnostics;
};

/// Throws ParseError on malformed XML, non-integer num/prec/suivK, a
/// conditionK without suivK, duplicate or non-contiguous indices, and guard
/// syntax errors.
LegacyParseResult parse_legacy(std::string_view bytes);

struct ScenarioDefaults {
    std::string id = "storyboard";
    std::string title;
    std::string act_id = "act1";
    std::string objective_id = "objective";
    std::string objective_name = "principal objective";
    Decimal threshold;
    std::string score_variable = "score";
    Decimal score_initial;
    Interval score_range{Decimal::from_int(0), Decimal::from_int(100)};
};

/// Lifts a legacy storyboard into a single-act scenario with one default
/// objective and the default score variable. Throws DiagnosticError with
/// E003/E004 when the start scene is missing or ambiguous.
Scenario to_scenario(const LegacyStoryboard& legacy, const ScenarioDefaults& defaults = {});

struct ScenarioParseResult {
    Scenario scenario;
    std::vector<Diagnostic> diagnostics;
};

/// Throws ParseError (with element path) on schema violations. Model
/// invariant violations are reported as diagnostics.
ScenarioParseResult parse_scenario(std::string_view bytes);

/// Deterministic UTF-8, LF-terminated canonical document.
std::string serialize_scenario(const Scenario& scenario);

/// Throws NotRepresentable for multi-act scenarios or scenes with choices.
std::string export_legacy(const Scenario& scenario);

enum class DocumentKind { Legacy, Canonical, Unknown };

/// Sniffs the root element name without a full parse.
DocumentKind detect_document_kind(std::string_view bytes);

}  // namespace sgforge
