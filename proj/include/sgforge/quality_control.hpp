#pragma once

// Static pedagogical quality control over the storyboard graph.
//
// Guards are treated under may-semantics: a guarded edge can be taken unless
// interval analysis proves its guard never holds within the declared
// variable ranges, in which case the edge is pruned.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "sgforge/diagnostics.hpp"
#include "sgforge/scenario.hpp"

namespace sgforge {

enum class EdgeKind { Guarded, Fallback, Choice };

struct SceneEdge {
    SceneNum from = 0;
    std::optional<Condition> guard;
    SceneNum to = 0;
    EdgeKind kind = EdgeKind::Fallback;
    /// Guard proven unsatisfiable; the edge is excluded from analyses.
    bool pruned = false;
};

struct SceneGraph {
    std::vector<SceneNum> nodes;  // ascending
    SceneNum start = 0;
    std::vector<SceneEdge> edges;  // per scene, in transition order, then choices
    std::set<SceneNum> terminals;

    /// Distinct live successors of `node` in first-occurrence order.
    std::vector<SceneNum> successors(SceneNum node, bool include_pruned = false) const;
};

/// Requires a scenario without structural errors (see check_structure).
SceneGraph build_graph(const Scenario& scenario);

std::set<SceneNum> find_unreachable(const SceneGraph& graph);

/// Reachable scenes from which no terminal scene is reachable.
std::set<SceneNum> find_dead_ends(const SceneGraph& graph);

struct PathLimits {
    std::size_t max_paths = 10000;
    /// A path may visit any scene at most 1 + max_cycle_unrolls times.
    std::size_t max_cycle_unrolls = 1;
};

struct ObjectiveBounds {
    Decimal pessimistic;
    Decimal optimistic;

    friend bool operator==(const ObjectiveBounds&, const ObjectiveBounds&) = default;
};

struct PathReport {
    std::vector<std::vector<SceneNum>> paths;
    bool truncated = false;
    /// Parallel to `paths`; keyed by objective id. Empty until scored.
    std::vector<std::map<std::string, ObjectiveBounds>> scores;
};

/// Depth-first enumeration of start-to-terminal scene sequences, each path
/// reported once, in edge order.
PathReport enumerate_paths(const SceneGraph& graph, PathLimits limits = {});

/// Accumulated score bounds of `path` for every declared objective, using the
/// learner profile's score mechanism (sum, max or last).
std::map<std::string, ObjectiveBounds> score_path(const Scenario& scenario, const std::vector<SceneNum>& path);

/// Fills report.scores.
void score_paths(const Scenario& scenario, PathReport& report);

/// One diagnostic per principal objective at most: E011 when some path
/// cannot reach the threshold even optimistically, otherwise W015 when some
/// path does not guarantee it pessimistically.
std::vector<Diagnostic> check_objective_coverage(const Scenario& scenario, const PathReport& report);

/// E009 for never-satisfiable guards, W010 for guards that can never fire
/// because earlier guards on the same scene already cover them.
std::vector<Diagnostic> check_guard_sanity(const Scenario& scenario);

/// Unreachable (E006/W006) and dead-end (E007) diagnostics for a graph.
std::vector<Diagnostic> check_graph(const SceneGraph& graph);

struct ValidationOptions {
    PathLimits limits;
};

struct ValidationResult {
    std::vector<Diagnostic> diagnostics;
    std::optional<SceneGraph> graph;
    std::optional<PathReport> paths;
};

/// Full pipeline: structure, then (when structurally sound) graph, guard and
/// coverage checks. Coverage is skipped while dead ends exist.
ValidationResult validate_scenario(const Scenario& scenario, const ValidationOptions& options = {});

}  // namespace sgforge
