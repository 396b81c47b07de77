#pragma once

// Seeded Monte Carlo simulation of virtual learners.
//
// Step model at a scene whose activity scores objective o with interval
// [lo, hi]:
//
//   help  ~ Bernoulli(help_use_prob)
//   eps   ~ Uniform[-noise_level, +noise_level]          (one draw per visit)
//   p_o   = clamp(k(o) + help_bonus*help + retry_care_bonus*(revisit) + eps, 0, 1)
//   score = clamp(round(lo + (hi - lo) * p_o), lo, hi)
//   k(o) <- k(o) + alpha * (1 - k(o))                    (after scoring)
//
// Variable effects use the visit performance p (mean of p_o, or
// clamp(0.5 + eps) for activities without objective effects): the value
// lo + (hi - lo) * p is added to (mode add) or assigned to (mode set) the
// variable, then clamped to its declared range. Routing takes the first
// guard that holds, else the fallback; at a choice scene the player picks a
// uniformly random unvisited target with probability exploration_prob,
// otherwise the first listed target.
//
// Randomness: each player owns a std::mt19937_64 seeded with
// split_seed(master_seed, player_index); uniforms are (x >> 11) * 2^-53.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgforge/diagnostics.hpp"
#include "sgforge/scenario.hpp"

namespace sgforge {

struct BehaviorProfile {
    std::string name = "custom";
    double exploration_prob = 0.5;
    double retry_care_bonus = 0.0;
    double help_use_prob = 0.0;
    double speed_factor = 1.0;
    double noise_level = 0.0;

    /// Throws InvalidArgument when a parameter is outside its range.
    void check() const;
    friend bool operator==(const BehaviorProfile&, const BehaviorProfile&) = default;
};

/// curious, prudent, hasty, confident.
std::optional<BehaviorProfile> preset_profile(std::string_view name);

using KnowledgeState = std::map<std::string, double>;

struct SimulationParams {
    double alpha = 0.3;
    double help_bonus = 0.1;
    std::size_t max_steps = 1000;
};

/// A scenario that passed validation without errors. Warnings are allowed.
class ValidatedScenario {
public:
    /// Throws DiagnosticError carrying the first error diagnostic.
    static ValidatedScenario check(Scenario scenario);
    const Scenario& scenario() const { return scenario_; }
    const std::vector<Diagnostic>& warnings() const { return warnings_; }

private:
    ValidatedScenario() = default;
    Scenario scenario_;
    std::vector<Diagnostic> warnings_;
};

struct PlayStep {
    SceneNum scene = 0;
    double duration_s = 0.0;
    bool help_used = false;
    std::map<std::string, Decimal> scores;
    std::map<std::string, int> tool_clicks;
    /// Knowledge after the step.
    KnowledgeState knowledge;
};

struct PlayTrace {
    std::vector<SceneNum> scenes_visited;
    std::vector<PlayStep> steps;
    /// Variable values after each step.
    std::vector<VariableEnv> env_history;
    KnowledgeState initial_knowledge;
    KnowledgeState final_knowledge;
    /// Accumulated score per objective under the profile's mechanism.
    std::map<std::string, Decimal> accumulated;
    bool truncated = false;
};

/// Deterministic in (scenario, profile, k0, seed, params).
PlayTrace simulate_player(const ValidatedScenario& scenario, const BehaviorProfile& profile, const KnowledgeState& k0,
                          std::uint64_t seed, const SimulationParams& params = {});

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
/// Child seed of player `index`: mix64(master ^ mix64(index)).
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

struct CohortGroup {
    BehaviorProfile profile;
    /// Initial knowledge, drawn uniformly from the listed values per
    /// objective. Key "*" applies to objectives without their own entry.
    std::map<std::string, std::vector<double>> knowledge{{"*", {0.0}}};
    std::size_t count = 0;
};

struct Cohort {
    std::vector<CohortGroup> groups;
    std::uint64_t seed = 0;
    SimulationParams params;

    std::size_t size() const;
};

struct GainStats {
    double mean = 0.0;
    double stddev = 0.0;
    friend bool operator==(const GainStats&, const GainStats&) = default;
};

struct SimulationReport {
    std::size_t n_players = 0;
    std::optional<GainStats> pedagogical_gain;
    std::map<std::string, double> attainment_rate;
    std::map<std::string, std::size_t> path_frequency;
    std::size_t truncation_count = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const SimulationReport&, const SimulationReport&) = default;
};

/// `threads` == 0 uses the hardware concurrency. The result does not depend
/// on the thread count.
SimulationReport simulate_cohort(const ValidatedScenario& scenario, const Cohort& cohort, unsigned threads = 1);

/// Parses the JSON-lines cohort file (see docs/formats.md). Throws ParseError.
Cohort parse_cohort(std::string_view jsonl);

/// Scene sequence rendered as "1>2>3".
std::string path_key(const std::vector<SceneNum>& path);

std::string report_to_json(const SimulationReport& report);
std::string gain_summary_text(const SimulationReport& report);
std::string gain_summary_jsonl(const SimulationReport& report);

}  // namespace sgforge
