#include "sgforge/scenario.hpp"

#include <array>

namespace sgforge {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<Enum, std::string_view>, N>& table, std::string_view text) {
    for (const auto& [value, name] : table) {
        if (name == text) return value;
    }
    return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum value) {
    for (const auto& [v, name] : table) {
        if (v == value) return name;
    }
    return "?";
}

constexpr std::array<std::pair<Grain, std::string_view>, 3> kGrains{{
    {Grain::MicroActivity, "micro-activity"},
    {Grain::Activity, "activity"},
    {Grain::Module, "module"},
}};
constexpr std::array<std::pair<Moment, std::string_view>, 2> kMoments{{
    {Moment::Learning, "learning"},
    {Moment::Entertaining, "entertaining"},
}};
constexpr std::array<std::pair<ScoreMechanism, std::string_view>, 3> kMechanisms{{
    {ScoreMechanism::Sum, "sum"},
    {ScoreMechanism::Max, "max"},
    {ScoreMechanism::Last, "last"},
}};
constexpr std::array<std::pair<Indicator, std::string_view>, 3> kIndicators{{
    {Indicator::PathFollowed, "path_followed"},
    {Indicator::ActionSpeed, "action_speed"},
    {Indicator::ClickCounts, "click_counts"},
}};
constexpr std::array<std::pair<EffectMode, std::string_view>, 2> kModes{{
    {EffectMode::Add, "add"},
    {EffectMode::Set, "set"},
}};

}  // namespace

std::string_view to_string(Grain g) { return name_of(kGrains, g); }
std::string_view to_string(Moment m) { return name_of(kMoments, m); }
std::string_view to_string(ScoreMechanism m) { return name_of(kMechanisms, m); }
std::string_view to_string(Indicator i) { return name_of(kIndicators, i); }
std::string_view to_string(EffectMode m) { return name_of(kModes, m); }
std::optional<Grain> parse_grain(std::string_view text) { return lookup(kGrains, text); }
std::optional<Moment> parse_moment(std::string_view text) { return lookup(kMoments, text); }
std::optional<ScoreMechanism> parse_score_mechanism(std::string_view text) { return lookup(kMechanisms, text); }
std::optional<Indicator> parse_indicator(std::string_view text) { return lookup(kIndicators, text); }
std::optional<EffectMode> parse_effect_mode(std::string_view text) { return lookup(kModes, text); }

ScoreMechanism LearnerProfileSpec::mechanism_for(const std::string& objective_id) const {
    auto it = score_mechanism.find(objective_id);
    return it == score_mechanism.end() ? ScoreMechanism::Sum : it->second;
}

const PedagogicalObjective* Scenario::find_objective(std::string_view objective_id) const {
    for (const auto& o : objectives) {
        if (o.id == objective_id) return &o;
    }
    return nullptr;
}

const ActivitySpec* Scenario::find_activity(std::string_view activity_id) const {
    auto it = activities.find(std::string(activity_id));
    return it == activities.end() ? nullptr : &it->second;
}

const Scene* Scenario::find_scene(SceneNum num) const {
    for (const auto& act : acts) {
        for (const auto& scene : act.scenes) {
            if (scene.num == num) return &scene;
        }
    }
    return nullptr;
}

std::vector<const Scene*> Scenario::scenes() const {
    std::vector<const Scene*> out;
    for (const auto& act : acts) {
        for (const auto& scene : act.scenes) out.push_back(&scene);
    }
    return out;
}

std::optional<SceneNum> Scenario::start_scene() const {
    std::optional<SceneNum> start;
    for (const auto* scene : scenes()) {
        if (scene->prec != 0) continue;
        if (start) return std::nullopt;
        start = scene->num;
    }
    return start;
}

RangeMap Scenario::variable_ranges() const {
    RangeMap ranges;
    for (const auto& v : variables) ranges.emplace(v.name, v.range);
    return ranges;
}

VariableEnv Scenario::initial_env() const {
    VariableEnv env;
    for (const auto& v : variables) env.emplace(v.name, v.initial);
    return env;
}

}  // namespace sgforge
