#include "sgforge/quality_control.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "sgforge/errors.hpp"

namespace sgforge {

namespace {

std::string path_to_string(const std::vector<SceneNum>& path) {
    std::string out;
    for (auto n : path) {
        if (!out.empty()) out += '>';
        out += std::to_string(n);
    }
    return out;
}

using Adjacency = std::map<SceneNum, std::vector<SceneNum>>;

Adjacency live_adjacency(const SceneGraph& g, bool include_pruned) {
    Adjacency adj;
    for (auto n : g.nodes) adj[n];
    for (const auto& e : g.edges) {
        if (e.pruned && !include_pruned) continue;
        auto& out = adj[e.from];
        if (std::find(out.begin(), out.end(), e.to) == out.end()) out.push_back(e.to);
    }
    return adj;
}

std::set<SceneNum> reachable_from(const Adjacency& adj, const std::vector<SceneNum>& seeds) {
    std::set<SceneNum> seen(seeds.begin(), seeds.end());
    std::deque<SceneNum> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
        const auto n = queue.front();
        queue.pop_front();
        auto it = adj.find(n);
        if (it == adj.end()) continue;
        for (auto next : it->second) {
            if (seen.insert(next).second) queue.push_back(next);
        }
    }
    return seen;
}

Adjacency reversed(const Adjacency& adj) {
    Adjacency rev;
    for (const auto& [from, targets] : adj) {
        rev[from];
        for (auto to : targets) rev[to].push_back(from);
    }
    return rev;
}

bool graph_blocking(const Diagnostic& d) {
    return d.code == codes::kDuplicateScene || d.code == codes::kDanglingTarget || d.code == codes::kNoStart ||
           d.code == codes::kMultipleStarts;
}

bool coverage_blocking(const Diagnostic& d) {
    return d.code == codes::kDanglingActivity || d.code == codes::kInvalidDeclaration;
}

}  // namespace

std::vector<SceneNum> SceneGraph::successors(SceneNum node, bool include_pruned) const {
    std::vector<SceneNum> out;
    for (const auto& e : edges) {
        if (e.from != node || (e.pruned && !include_pruned)) continue;
        if (std::find(out.begin(), out.end(), e.to) == out.end()) out.push_back(e.to);
    }
    return out;
}

SceneGraph build_graph(const Scenario& scenario) {
    SceneGraph g;
    auto scenes = scenario.scenes();
    std::stable_sort(scenes.begin(), scenes.end(), [](const Scene* a, const Scene* b) { return a->num < b->num; });
    const auto ranges = scenario.variable_ranges();
    for (const auto* scene : scenes) {
        g.nodes.push_back(scene->num);
        if (scene->is_terminal()) g.terminals.insert(scene->num);
        for (const auto& t : scene->transitions) {
            SceneEdge e{scene->num, t.guard, t.target, t.guard ? EdgeKind::Guarded : EdgeKind::Fallback, false};
            if (t.guard) {
                try {
                    e.pruned = satisfiable(*t.guard, ranges) == Satisfiability::Never;
                } catch (const MissingRange&) {
                    e.pruned = false;
                }
            }
            g.edges.push_back(std::move(e));
        }
        for (auto target : scene->choices) {
            g.edges.push_back(SceneEdge{scene->num, std::nullopt, target, EdgeKind::Choice, false});
        }
    }
    g.start = scenario.start_scene().value_or(g.nodes.empty() ? 0 : g.nodes.front());
    return g;
}

std::set<SceneNum> find_unreachable(const SceneGraph& g) {
    const auto seen = reachable_from(live_adjacency(g, false), {g.start});
    std::set<SceneNum> out;
    for (auto n : g.nodes) {
        if (!seen.contains(n)) out.insert(n);
    }
    return out;
}

std::set<SceneNum> find_dead_ends(const SceneGraph& g) {
    const auto adj = live_adjacency(g, false);
    const auto reachable = reachable_from(adj, {g.start});
    const auto co_reachable = reachable_from(reversed(adj), {g.terminals.begin(), g.terminals.end()});
    std::set<SceneNum> out;
    for (auto n : reachable) {
        if (!co_reachable.contains(n)) out.insert(n);
    }
    return out;
}

PathReport enumerate_paths(const SceneGraph& g, PathLimits limits) {
    PathReport report;
    const auto adj = live_adjacency(g, false);
    const std::size_t bound = 1 + limits.max_cycle_unrolls;
    std::map<SceneNum, std::size_t> visits;
    std::vector<SceneNum> path;
    bool stop = false;

    std::function<void(SceneNum)> dfs = [&](SceneNum node) {
        path.push_back(node);
        ++visits[node];
        if (g.terminals.contains(node)) {
            if (report.paths.size() >= limits.max_paths) {
                report.truncated = true;
                stop = true;
            } else {
                report.paths.push_back(path);
            }
        } else if (auto it = adj.find(node); it != adj.end()) {
            for (auto next : it->second) {
                if (stop) break;
                if (visits[next] < bound) dfs(next);
            }
        }
        --visits[node];
        path.pop_back();
    };
    if (std::find(g.nodes.begin(), g.nodes.end(), g.start) != g.nodes.end()) dfs(g.start);
    return report;
}

std::map<std::string, ObjectiveBounds> score_path(const Scenario& scenario, const std::vector<SceneNum>& path) {
    std::map<std::string, ObjectiveBounds> out;
    for (const auto& objective : scenario.objectives) {
        const auto mechanism = scenario.learner_profile.mechanism_for(objective.id);
        std::optional<ObjectiveBounds> acc;
        for (auto num : path) {
            const auto* scene = scenario.find_scene(num);
            if (scene == nullptr || !scene->activity_id) continue;
            const auto* activity = scenario.find_activity(*scene->activity_id);
            if (activity == nullptr) continue;
            auto it = activity->objective_effects.find(objective.id);
            if (it == activity->objective_effects.end()) continue;
            const ObjectiveBounds step{it->second.lo, it->second.hi};
            if (!acc) {
                acc = step;
                continue;
            }
            switch (mechanism) {
                case ScoreMechanism::Sum:
                    acc->pessimistic += step.pessimistic;
                    acc->optimistic += step.optimistic;
                    break;
                case ScoreMechanism::Max:
                    acc->pessimistic = std::max(acc->pessimistic, step.pessimistic);
                    acc->optimistic = std::max(acc->optimistic, step.optimistic);
                    break;
                case ScoreMechanism::Last:
                    acc = step;
                    break;
            }
        }
        out[objective.id] = acc.value_or(ObjectiveBounds{});
    }
    return out;
}

void score_paths(const Scenario& scenario, PathReport& report) {
    report.scores.clear();
    for (const auto& path : report.paths) report.scores.push_back(score_path(scenario, path));
}

std::vector<Diagnostic> check_objective_coverage(const Scenario& scenario, const PathReport& report) {
    std::vector<Diagnostic> out;
    std::vector<std::map<std::string, ObjectiveBounds>> computed;
    const auto* scores = &report.scores;
    if (scores->size() != report.paths.size()) {
        for (const auto& path : report.paths) computed.push_back(score_path(scenario, path));
        scores = &computed;
    }
    std::set<std::string> done;
    for (const auto& id : scenario.principal_objectives) {
        if (!done.insert(id).second) continue;
        const auto* objective = scenario.find_objective(id);
        if (objective == nullptr) continue;
        std::size_t impossible = 0;
        std::size_t unsure = 0;
        std::optional<std::size_t> first_impossible;
        std::optional<std::size_t> first_unsure;
        for (std::size_t i = 0; i < report.paths.size(); ++i) {
            const auto it = (*scores)[i].find(id);
            const auto bounds = it == (*scores)[i].end() ? ObjectiveBounds{} : it->second;
            if (bounds.optimistic < objective->threshold) {
                ++impossible;
                if (!first_impossible) first_impossible = i;
            } else if (bounds.pessimistic < objective->threshold) {
                ++unsure;
                if (!first_unsure) first_unsure = i;
            }
        }
        const auto total = std::to_string(report.paths.size()) + (report.truncated ? "+" : "");
        if (impossible > 0) {
            const auto& b = (*scores)[*first_impossible].at(id);
            out.push_back(make_diagnostic(
                codes::kCoverageImpossible, std::nullopt,
                "objective '" + id + "' (threshold " + objective->threshold.to_string() + ") cannot be attained on " +
                    std::to_string(impossible) + " of " + total + " paths, e.g. " +
                    path_to_string(report.paths[*first_impossible]) + " (best " + b.optimistic.to_string() + ")"));
        } else if (unsure > 0) {
            const auto& b = (*scores)[*first_unsure].at(id);
            out.push_back(make_diagnostic(
                codes::kCoverageNotGuaranteed, std::nullopt,
                "objective '" + id + "' (threshold " + objective->threshold.to_string() + ") is not guaranteed on " +
                    std::to_string(unsure) + " of " + total + " paths, e.g. " +
                    path_to_string(report.paths[*first_unsure]) + " (worst " + b.pessimistic.to_string() + ")"));
        }
    }
    sort_diagnostics(out);
    return out;
}

std::vector<Diagnostic> check_guard_sanity(const Scenario& scenario) {
    std::vector<Diagnostic> out;
    const auto ranges = scenario.variable_ranges();
    auto declared = [&](const Condition& c) {
        const auto vars = free_vars(c);
        return std::all_of(vars.begin(), vars.end(), [&](const std::string& v) { return ranges.contains(v); });
    };
    for (const auto* scene : scenario.scenes()) {
        std::vector<Condition> earlier;
        std::size_t index = 0;
        for (const auto& t : scene->transitions) {
            ++index;
            if (!t.guard || !declared(*t.guard)) continue;
            const auto label = "scene " + std::to_string(scene->num) + " guard " + std::to_string(index) + " \"" +
                               print_condition(*t.guard) + "\"";
            if (satisfiable(*t.guard, ranges) == Satisfiability::Never) {
                out.push_back(make_diagnostic(codes::kUnsatisfiableGuard, scene->num,
                                              label + " never holds within the declared ranges"));
            } else if (!earlier.empty()) {
                auto residual = Condition::all_of({*t.guard, Condition::negate(Condition::any_of(earlier))});
                if (satisfiable(residual, ranges) == Satisfiability::Never) {
                    out.push_back(make_diagnostic(codes::kShadowedGuard, scene->num,
                                                  label + " is implied by earlier guards and can never fire"));
                }
            }
            earlier.push_back(*t.guard);
        }
    }
    sort_diagnostics(out);
    return out;
}

std::vector<Diagnostic> check_graph(const SceneGraph& g) {
    std::vector<Diagnostic> out;
    const auto unreachable = find_unreachable(g);
    const auto structurally_reachable = reachable_from(live_adjacency(g, true), {g.start});
    for (auto n : unreachable) {
        if (structurally_reachable.contains(n)) {
            out.push_back(make_diagnostic(codes::kUnreachablePruned, n,
                                          "scene " + std::to_string(n) +
                                              " is reachable only through guards that can never hold"));
        } else {
            out.push_back(make_diagnostic(codes::kUnreachable, n,
                                          "scene " + std::to_string(n) + " is unreachable from start scene " +
                                              std::to_string(g.start)));
        }
    }
    for (auto n : find_dead_ends(g)) {
        out.push_back(make_diagnostic(codes::kDeadEnd, n,
                                      "no terminal scene is reachable from scene " + std::to_string(n)));
    }
    sort_diagnostics(out);
    return out;
}

ValidationResult validate_scenario(const Scenario& scenario, const ValidationOptions& options) {
    ValidationResult result;
    auto& diags = result.diagnostics;
    diags = check_structure(scenario);
    if (std::any_of(diags.begin(), diags.end(), graph_blocking)) return result;

    const bool coverage_ok = std::none_of(diags.begin(), diags.end(), coverage_blocking);
    result.graph = build_graph(scenario);
    const auto graph_diags = check_graph(*result.graph);
    const bool has_dead_ends = std::any_of(graph_diags.begin(), graph_diags.end(),
                                           [](const Diagnostic& d) { return d.code == codes::kDeadEnd; });
    diags.insert(diags.end(), graph_diags.begin(), graph_diags.end());
    const auto guard_diags = check_guard_sanity(scenario);
    diags.insert(diags.end(), guard_diags.begin(), guard_diags.end());

    if (!has_dead_ends) {
        result.paths = enumerate_paths(*result.graph, options.limits);
        score_paths(scenario, *result.paths);
        if (coverage_ok) {
            const auto coverage = check_objective_coverage(scenario, *result.paths);
            diags.insert(diags.end(), coverage.begin(), coverage.end());
        }
    }
    sort_diagnostics(diags);
    return result;
}

}  // namespace sgforge
