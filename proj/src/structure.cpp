#include <map>
#include <set>

#include "sgforge/diagnostics.hpp"

namespace sgforge {

namespace {

void check_declarations(const Scenario& s, std::vector<Diagnostic>& out) {
    auto invalid = [&out](std::string message) {
        out.push_back(make_diagnostic(codes::kInvalidDeclaration, std::nullopt, std::move(message)));
    };

    std::set<std::string> objective_ids;
    for (const auto& o : s.objectives) {
        if (!objective_ids.insert(o.id).second) invalid("duplicate objective id '" + o.id + "'");
        if (o.threshold < Decimal{}) invalid("objective '" + o.id + "' has a negative threshold");
    }
    if (s.principal_objectives.empty()) invalid("no principal objective declared");
    for (const auto& id : s.principal_objectives) {
        if (!objective_ids.contains(id)) invalid("principal objective '" + id + "' is not declared");
    }

    std::set<std::string> variable_names;
    for (const auto& v : s.variables) {
        if (!variable_names.insert(v.name).second) invalid("duplicate variable '" + v.name + "'");
        if (!v.range.valid()) {
            invalid("variable '" + v.name + "' has an empty range");
        } else if (!v.range.contains(v.initial)) {
            invalid("variable '" + v.name + "' initial value lies outside its range");
        }
    }

    std::set<std::string> act_ids;
    for (const auto& act : s.acts) {
        if (!act_ids.insert(act.id).second) invalid("duplicate act id '" + act.id + "'");
        if (!objective_ids.contains(act.objective_id)) {
            invalid("act '" + act.id + "' is dedicated to undeclared objective '" + act.objective_id + "'");
        }
    }

    for (const auto& [id, a] : s.activities) {
        if (a.expected_duration_s < Decimal{}) invalid("activity '" + id + "' has a negative duration");
        for (const auto& [objective, delta] : a.objective_effects) {
            if (!delta.valid()) invalid("activity '" + id + "' has an empty score interval for '" + objective + "'");
            if (!objective_ids.contains(objective)) {
                invalid("activity '" + id + "' scores undeclared objective '" + objective + "'");
            }
        }
        for (const auto& [variable, effect] : a.variable_effects) {
            if (!effect.delta.valid()) invalid("activity '" + id + "' has an empty interval for '" + variable + "'");
            if (!variable_names.contains(variable)) {
                invalid("activity '" + id + "' updates undeclared variable '" + variable + "'");
            }
        }
    }

    for (const auto& id : s.learner_profile.objectives) {
        if (!objective_ids.contains(id)) invalid("learner profile tracks undeclared objective '" + id + "'");
    }
    for (const auto& [id, mechanism] : s.learner_profile.score_mechanism) {
        if (!objective_ids.contains(id)) invalid("score mechanism given for undeclared objective '" + id + "'");
    }
}

}  // namespace

std::vector<Diagnostic> check_structure(const Scenario& s) {
    std::vector<Diagnostic> out;
    check_declarations(s, out);

    const auto scenes = s.scenes();
    std::map<SceneNum, int> occurrences;
    for (const auto* scene : scenes) ++occurrences[scene->num];
    for (const auto& [num, count] : occurrences) {
        if (count > 1) {
            out.push_back(make_diagnostic(codes::kDuplicateScene, num,
                                          "scene num " + std::to_string(num) + " is defined " +
                                              std::to_string(count) + " times"));
        }
    }

    std::vector<SceneNum> starts;
    for (const auto* scene : scenes) {
        if (scene->prec == 0) starts.push_back(scene->num);
    }
    if (starts.empty()) {
        out.push_back(make_diagnostic(codes::kNoStart, std::nullopt, "no scene has prec=0"));
    } else if (starts.size() > 1) {
        std::string list;
        for (auto n : starts) list += (list.empty() ? "" : ", ") + std::to_string(n);
        out.push_back(make_diagnostic(codes::kMultipleStarts, std::nullopt, "several start scenes: " + list));
    }

    const auto ranges = s.variable_ranges();
    std::map<SceneNum, std::set<SceneNum>> predecessors;
    for (const auto* scene : scenes) {
        std::set<SceneNum> dangling;
        auto visit_target = [&](SceneNum target) {
            predecessors[target].insert(scene->num);
            if (!occurrences.contains(target)) dangling.insert(target);
        };
        for (const auto& t : scene->transitions) visit_target(t.target);
        for (auto target : scene->choices) visit_target(target);
        for (auto target : dangling) {
            out.push_back(make_diagnostic(codes::kDanglingTarget, scene->num,
                                          "scene " + std::to_string(scene->num) + " targets undefined scene " +
                                              std::to_string(target)));
        }

        std::size_t guarded = 0;
        std::size_t unguarded = 0;
        std::set<std::string> undeclared;
        for (const auto& t : scene->transitions) {
            if (!t.guard) {
                ++unguarded;
                continue;
            }
            ++guarded;
            for (const auto& var : free_vars(*t.guard)) {
                if (!ranges.contains(var)) undeclared.insert(var);
            }
        }
        const bool trailing_fallback = !scene->transitions.empty() && !scene->transitions.back().guard;
        if (unguarded > 1 || (guarded > 0 && (unguarded != 1 || !trailing_fallback))) {
            std::string why = guarded > 0 && unguarded == 0 ? "guarded transitions have no unguarded fallback"
                              : unguarded > 1               ? "more than one unguarded transition"
                                                            : "the unguarded fallback is not the last transition";
            out.push_back(make_diagnostic(codes::kMissingFallback, scene->num,
                                          "scene " + std::to_string(scene->num) + ": " + why));
        }
        for (const auto& var : undeclared) {
            out.push_back(make_diagnostic(codes::kUndeclaredVariable, scene->num,
                                          "scene " + std::to_string(scene->num) + " guard uses undeclared variable '" +
                                              var + "'"));
        }

        if (!scene->transitions.empty() && !scene->choices.empty()) {
            out.push_back(make_diagnostic(codes::kInvalidDeclaration, scene->num,
                                          "scene " + std::to_string(scene->num) +
                                              " mixes guarded transitions and player choices"));
        }
        if (scene->moments.empty()) {
            out.push_back(make_diagnostic(codes::kInvalidDeclaration, scene->num,
                                          "scene " + std::to_string(scene->num) + " has no moment tag"));
        }
        if (scene->activity_id && s.find_activity(*scene->activity_id) == nullptr) {
            out.push_back(make_diagnostic(codes::kDanglingActivity, scene->num,
                                          "scene " + std::to_string(scene->num) + " references undeclared activity '" +
                                              *scene->activity_id + "'"));
        }
    }

    for (const auto* scene : scenes) {
        if (scene->prec == 0) continue;
        const auto& preds = predecessors[scene->num];
        if (!preds.contains(scene->prec)) {
            out.push_back(make_diagnostic(codes::kPrecInconsistent, scene->num,
                                          "scene " + std::to_string(scene->num) + " declares prec=" +
                                              std::to_string(scene->prec) + " but scene " + std::to_string(scene->prec) +
                                              " has no transition to it"));
        }
    }

    sort_diagnostics(out);
    return out;
}

}  // namespace sgforge
