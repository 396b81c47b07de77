#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sgforge/condition.hpp"
#include "sgforge/decimal.hpp"
#include "sgforge/xml.hpp"

namespace sgforge {

using SceneNum = long long;

/// Attributes and child elements the reader did not recognise. They are kept
/// verbatim and written back on serialization.
struct Extensions {
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<XmlElement> elements;

    bool empty() const { return attributes.empty() && elements.empty(); }
    friend bool operator==(const Extensions&, const Extensions&) = default;
};

enum class Grain { MicroActivity, Activity, Module };
enum class Moment { Learning, Entertaining };
enum class ScoreMechanism { Sum, Max, Last };
enum class Indicator { PathFollowed, ActionSpeed, ClickCounts };
enum class EffectMode { Add, Set };

std::string_view to_string(Grain g);
std::string_view to_string(Moment m);
std::string_view to_string(ScoreMechanism m);
std::string_view to_string(Indicator i);
std::string_view to_string(EffectMode m);
std::optional<Grain> parse_grain(std::string_view text);
std::optional<Moment> parse_moment(std::string_view text);
std::optional<ScoreMechanism> parse_score_mechanism(std::string_view text);
std::optional<Indicator> parse_indicator(std::string_view text);
std::optional<EffectMode> parse_effect_mode(std::string_view text);

struct Transition {
    std::optional<Condition> guard;
    SceneNum target = 0;

    friend bool operator==(const Transition&, const Transition&) = default;
};

struct Scene {
    SceneNum num = 0;
    /// 0 marks the start scene; otherwise advisory.
    SceneNum prec = 0;
    std::string asset_path;
    std::string description;
    std::optional<std::string> activity_id;
    std::set<Moment> moments{Moment::Learning};
    /// Ordered guard chain; the trailing entry is the unguarded fallback.
    std::vector<Transition> transitions;
    /// Unguarded player choices (targets, in listed order).
    std::vector<SceneNum> choices;
    Extensions ext;

    bool is_terminal() const { return transitions.empty() && choices.empty(); }
    friend bool operator==(const Scene&, const Scene&) = default;
};

struct Act {
    std::string id;
    std::string objective_id;
    std::vector<Scene> scenes;
    Extensions ext;

    friend bool operator==(const Act&, const Act&) = default;
};

struct VariableDecl {
    std::string name;
    Decimal initial;
    Interval range;
    Extensions ext;

    friend bool operator==(const VariableDecl&, const VariableDecl&) = default;
};

struct PedagogicalObjective {
    std::string id;
    std::string name;
    Decimal threshold;
    Extensions ext;

    friend bool operator==(const PedagogicalObjective&, const PedagogicalObjective&) = default;
};

struct VariableEffect {
    Interval delta;
    EffectMode mode = EffectMode::Add;

    friend bool operator==(const VariableEffect&, const VariableEffect&) = default;
};

struct ActivitySpec {
    std::string id;
    Grain grain = Grain::Activity;
    Decimal expected_duration_s;
    std::map<std::string, Interval> objective_effects;
    std::map<std::string, VariableEffect> variable_effects;
    Extensions ext;

    friend bool operator==(const ActivitySpec&, const ActivitySpec&) = default;
};

struct LearnerProfileSpec {
    std::vector<std::string> objectives;
    std::map<std::string, ScoreMechanism> score_mechanism;
    std::set<Indicator> indicators;

    /// Defaults to Sum for objectives without an explicit mechanism.
    ScoreMechanism mechanism_for(const std::string& objective_id) const;
    friend bool operator==(const LearnerProfileSpec&, const LearnerProfileSpec&) = default;
};

struct Scenario {
    std::string id;
    std::string title;
    std::vector<std::string> principal_objectives;
    std::vector<PedagogicalObjective> objectives;
    std::vector<Act> acts;
    std::vector<VariableDecl> variables;
    std::vector<std::string> toolbar;
    LearnerProfileSpec learner_profile;
    std::map<std::string, ActivitySpec> activities;
    Extensions ext;

    const PedagogicalObjective* find_objective(std::string_view id) const;
    const ActivitySpec* find_activity(std::string_view id) const;
    /// First scene with the given number across all acts.
    const Scene* find_scene(SceneNum num) const;
    /// All scenes in document order.
    std::vector<const Scene*> scenes() const;
    /// The unique scene with prec == 0, if exactly one exists.
    std::optional<SceneNum> start_scene() const;
    RangeMap variable_ranges() const;
    VariableEnv initial_env() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

}  // namespace sgforge
