#include "sgforge/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sgforge/errors.hpp"
#include "sgforge/quality_control.hpp"

namespace sgforge {

namespace {

using ordered_json = nlohmann::ordered_json;

class PlayerRng {
public:
    explicit PlayerRng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void fold_score(std::optional<Decimal>& acc, Decimal score, ScoreMechanism mechanism) {
    if (!acc) {
        acc = score;
        return;
    }
    switch (mechanism) {
        case ScoreMechanism::Sum: *acc += score; break;
        case ScoreMechanism::Max: acc = std::max(*acc, score); break;
        case ScoreMechanism::Last: acc = score; break;
    }
}

KnowledgeState draw_knowledge(const Scenario& scenario, const CohortGroup& group, PlayerRng& rng) {
    KnowledgeState k;
    for (const auto& objective : scenario.objectives) {
        auto it = group.knowledge.find(objective.id);
        if (it == group.knowledge.end()) it = group.knowledge.find("*");
        if (it == group.knowledge.end() || it->second.empty()) {
            k[objective.id] = 0.0;
            continue;
        }
        const auto& values = it->second;
        const auto pick = std::min(values.size() - 1, static_cast<std::size_t>(rng.uniform() * values.size()));
        k[objective.id] = values[pick];
    }
    return k;
}

PlayTrace play(const Scenario& scenario, const BehaviorProfile& profile, const KnowledgeState& k0, PlayerRng& rng,
               const SimulationParams& params) {
    PlayTrace trace;
    KnowledgeState k;
    for (const auto& objective : scenario.objectives) {
        auto it = k0.find(objective.id);
        k[objective.id] = it == k0.end() ? 0.0 : clamp01(it->second);
    }
    trace.initial_knowledge = k;
    VariableEnv env = scenario.initial_env();
    const auto ranges = scenario.variable_ranges();
    std::map<std::string, std::optional<Decimal>> accumulated;
    std::map<SceneNum, std::size_t> visits;

    auto scene_num = scenario.start_scene().value();
    bool finished = false;
    for (std::size_t step_index = 0; step_index < params.max_steps; ++step_index) {
        const Scene* scene = scenario.find_scene(scene_num);
        if (scene == nullptr) throw Error("simulation reached undefined scene " + std::to_string(scene_num));
        trace.scenes_visited.push_back(scene_num);
        const bool revisit = visits[scene_num]++ > 0;

        PlayStep step;
        step.scene = scene_num;
        const ActivitySpec* activity = scene->activity_id ? scenario.find_activity(*scene->activity_id) : nullptr;
        if (activity != nullptr) {
            step.help_used = rng.uniform() < profile.help_use_prob;
            const double eps = (2.0 * rng.uniform() - 1.0) * profile.noise_level;
            const double bonus = params.help_bonus * (step.help_used ? 1.0 : 0.0) +
                                 profile.retry_care_bonus * (revisit ? 1.0 : 0.0);

            double performance_sum = 0.0;
            for (const auto& [objective, delta] : activity->objective_effects) {
                const double p = clamp01(k[objective] + bonus + eps);
                performance_sum += p;
                const double lo = delta.lo.to_double();
                const double hi = delta.hi.to_double();
                const auto raw = Decimal::from_int(std::llround(lo + (hi - lo) * p));
                const Decimal score = std::clamp(raw, delta.lo, delta.hi);
                step.scores[objective] = score;
                fold_score(accumulated[objective], score, scenario.learner_profile.mechanism_for(objective));
            }
            for (const auto& [objective, delta] : activity->objective_effects) {
                k[objective] = clamp01(k[objective] + params.alpha * (1.0 - k[objective]));
            }

            const double performance = activity->objective_effects.empty()
                                           ? clamp01(0.5 + eps)
                                           : performance_sum / static_cast<double>(activity->objective_effects.size());
            for (const auto& [variable, effect] : activity->variable_effects) {
                const double lo = effect.delta.lo.to_double();
                const double hi = effect.delta.hi.to_double();
                const auto amount = Decimal::from_double(lo + (hi - lo) * performance);
                Decimal value = effect.mode == EffectMode::Set ? amount : env[variable] + amount;
                if (auto r = ranges.find(variable); r != ranges.end()) value = std::clamp(value, r->second.lo, r->second.hi);
                env[variable] = value;
            }

            step.duration_s = activity->expected_duration_s.to_double() * profile.speed_factor *
                              (1.0 + 0.5 * (step.help_used ? 1.0 : 0.0));
            if (step.help_used) step.tool_clicks["help"] = 1;
        }
        step.knowledge = k;
        trace.steps.push_back(std::move(step));
        trace.env_history.push_back(env);

        if (scene->is_terminal()) {
            finished = true;
            break;
        }
        if (!scene->transitions.empty()) {
            std::optional<SceneNum> next;
            for (const auto& t : scene->transitions) {
                if (!t.guard || eval_condition(*t.guard, env)) {
                    next = t.target;
                    break;
                }
            }
            if (!next) throw Error("scene " + std::to_string(scene_num) + " has no applicable transition");
            scene_num = *next;
        } else {
            std::vector<SceneNum> unvisited;
            for (auto target : scene->choices) {
                if (!visits.contains(target) && std::find(unvisited.begin(), unvisited.end(), target) == unvisited.end()) {
                    unvisited.push_back(target);
                }
            }
            const bool explore = rng.uniform() < profile.exploration_prob;
            if (explore && !unvisited.empty()) {
                const auto pick =
                    std::min(unvisited.size() - 1, static_cast<std::size_t>(rng.uniform() * unvisited.size()));
                scene_num = unvisited[pick];
            } else {
                scene_num = scene->choices.front();
            }
        }
    }

    trace.truncated = !finished;
    trace.final_knowledge = k;
    for (const auto& objective : scenario.objectives) {
        auto it = accumulated.find(objective.id);
        trace.accumulated[objective.id] = it == accumulated.end() ? Decimal{} : it->second.value_or(Decimal{});
    }
    return trace;
}

struct PlayerOutcome {
    std::string path;
    double gain = 0.0;
    std::vector<bool> attained;  // per scenario.objectives
    bool truncated = false;
};

double number_field(const ordered_json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ParseError("", std::string("field '") + key + "' must be a number");
    return j[key].get<double>();
}

BehaviorProfile read_profile(const ordered_json& j) {
    BehaviorProfile profile;
    if (j.is_string()) {
        auto preset = preset_profile(j.get<std::string>());
        if (!preset) throw ParseError("", "unknown profile '" + j.get<std::string>() + "'");
        return *preset;
    }
    if (!j.is_object()) throw ParseError("", "profile must be a preset name or an object");
    if (j.contains("preset")) {
        auto preset = preset_profile(j["preset"].get<std::string>());
        if (!preset) throw ParseError("", "unknown preset '" + j["preset"].get<std::string>() + "'");
        profile = *preset;
    }
    if (j.contains("name")) profile.name = j["name"].get<std::string>();
    profile.exploration_prob = number_field(j, "exploration_prob", profile.exploration_prob);
    profile.retry_care_bonus = number_field(j, "retry_care_bonus", profile.retry_care_bonus);
    profile.help_use_prob = number_field(j, "help_use_prob", profile.help_use_prob);
    profile.speed_factor = number_field(j, "speed_factor", profile.speed_factor);
    profile.noise_level = number_field(j, "noise_level", profile.noise_level);
    return profile;
}

}  // namespace

void BehaviorProfile::check() const {
    auto require = [this](bool ok, const char* what) {
        if (!ok) throw InvalidArgument("profile '" + name + "': " + what);
    };
    require(exploration_prob >= 0.0 && exploration_prob <= 1.0, "exploration_prob must lie in [0,1]");
    require(retry_care_bonus >= 0.0 && retry_care_bonus <= 0.5, "retry_care_bonus must lie in [0,0.5]");
    require(help_use_prob >= 0.0 && help_use_prob <= 1.0, "help_use_prob must lie in [0,1]");
    require(speed_factor > 0.0 && std::isfinite(speed_factor), "speed_factor must be positive");
    require(noise_level >= 0.0 && noise_level <= 0.5, "noise_level must lie in [0,0.5]");
}

std::optional<BehaviorProfile> preset_profile(std::string_view name) {
    if (name == "curious") return BehaviorProfile{"curious", 0.9, 0.0, 0.5, 1.0, 0.1};
    if (name == "prudent") return BehaviorProfile{"prudent", 0.3, 0.2, 0.9, 1.3, 0.05};
    if (name == "hasty") return BehaviorProfile{"hasty", 0.2, 0.0, 0.1, 0.6, 0.3};
    if (name == "confident") return BehaviorProfile{"confident", 0.5, 0.0, 0.1, 0.9, 0.15};
    return std::nullopt;
}

ValidatedScenario ValidatedScenario::check(Scenario scenario) {
    auto result = validate_scenario(scenario);
    for (const auto& d : result.diagnostics) {
        if (d.severity == Severity::Error) throw DiagnosticError(d);
    }
    ValidatedScenario v;
    v.scenario_ = std::move(scenario);
    v.warnings_ = std::move(result.diagnostics);
    return v;
}

std::uint64_t mix64(std::uint64_t x) {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) { return mix64(master ^ mix64(index)); }

PlayTrace simulate_player(const ValidatedScenario& scenario, const BehaviorProfile& profile, const KnowledgeState& k0,
                          std::uint64_t seed, const SimulationParams& params) {
    profile.check();
    PlayerRng rng(seed);
    return play(scenario.scenario(), profile, k0, rng, params);
}

std::size_t Cohort::size() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.count;
    return n;
}

std::string path_key(const std::vector<SceneNum>& path) {
    std::string out;
    for (auto n : path) {
        if (!out.empty()) out += '>';
        out += std::to_string(n);
    }
    return out;
}

SimulationReport simulate_cohort(const ValidatedScenario& validated, const Cohort& cohort, unsigned threads) {
    const Scenario& scenario = validated.scenario();
    for (const auto& g : cohort.groups) g.profile.check();

    SimulationReport report;
    report.seed = cohort.seed;
    report.n_players = cohort.size();
    if (report.n_players == 0) return report;

    // Player index -> group.
    std::vector<const CohortGroup*> group_of;
    group_of.reserve(report.n_players);
    for (const auto& g : cohort.groups) group_of.insert(group_of.end(), g.count, &g);

    std::vector<std::string> principal;
    for (const auto& id : scenario.principal_objectives) {
        if (std::find(principal.begin(), principal.end(), id) == principal.end()) principal.push_back(id);
    }

    std::vector<PlayerOutcome> outcomes(report.n_players);
    auto run_player = [&](std::size_t i) {
        PlayerRng rng(split_seed(cohort.seed, i));
        const auto k0 = draw_knowledge(scenario, *group_of[i], rng);
        const auto trace = play(scenario, group_of[i]->profile, k0, rng, cohort.params);
        PlayerOutcome& out = outcomes[i];
        out.path = path_key(trace.scenes_visited);
        out.truncated = trace.truncated;
        double gain = 0.0;
        for (const auto& id : principal) gain += trace.final_knowledge.at(id) - trace.initial_knowledge.at(id);
        out.gain = principal.empty() ? 0.0 : gain / static_cast<double>(principal.size());
        for (const auto& objective : scenario.objectives) {
            out.attained.push_back(trace.accumulated.at(objective.id) >= objective.threshold);
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, report.n_players));
    if (threads <= 1) {
        for (std::size_t i = 0; i < report.n_players; ++i) run_player(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> failures(threads);
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = next++; i < report.n_players; i = next++) run_player(i);
                } catch (...) {
                    failures[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& f : failures) {
            if (f) std::rethrow_exception(f);
        }
    }

    // Aggregate in player order so floating-point sums are reproducible.
    const auto n = static_cast<double>(report.n_players);
    double sum = 0.0;
    std::vector<std::size_t> attained(scenario.objectives.size(), 0);
    for (const auto& o : outcomes) {
        sum += o.gain;
        ++report.path_frequency[o.path];
        if (o.truncated) ++report.truncation_count;
        for (std::size_t j = 0; j < attained.size(); ++j) attained[j] += o.attained[j] ? 1 : 0;
    }
    const double mean = sum / n;
    double squares = 0.0;
    for (const auto& o : outcomes) squares += (o.gain - mean) * (o.gain - mean);
    report.pedagogical_gain = GainStats{mean, std::sqrt(squares / n)};
    for (std::size_t j = 0; j < attained.size(); ++j) {
        report.attainment_rate[scenario.objectives[j].id] = static_cast<double>(attained[j]) / n;
    }
    return report;
}

Cohort parse_cohort(std::string_view jsonl) {
    Cohort cohort;
    std::istringstream in{std::string(jsonl)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const std::string where = "cohort line " + std::to_string(line_no);
        try {
            const auto j = ordered_json::parse(line);
            if (!j.is_object()) throw ParseError(where, "record must be a JSON object");
            const auto type = j.value("type", std::string("group"));
            if (type == "settings") {
                if (j.contains("seed")) cohort.seed = j["seed"].get<std::uint64_t>();
                if (j.contains("max_steps")) cohort.params.max_steps = j["max_steps"].get<std::size_t>();
                cohort.params.alpha = number_field(j, "alpha", cohort.params.alpha);
                cohort.params.help_bonus = number_field(j, "help_bonus", cohort.params.help_bonus);
                if (cohort.params.alpha < 0.0 || cohort.params.alpha > 1.0) {
                    throw ParseError(where, "alpha must lie in [0,1]");
                }
            } else if (type == "group") {
                CohortGroup group;
                group.profile = read_profile(j.contains("profile") ? j["profile"] : ordered_json("curious"));
                if (j.contains("overrides")) {
                    auto merged = j["overrides"];
                    merged["name"] = merged.value("name", group.profile.name);
                    BehaviorProfile base = group.profile;
                    base.name = merged["name"].get<std::string>();
                    base.exploration_prob = number_field(merged, "exploration_prob", base.exploration_prob);
                    base.retry_care_bonus = number_field(merged, "retry_care_bonus", base.retry_care_bonus);
                    base.help_use_prob = number_field(merged, "help_use_prob", base.help_use_prob);
                    base.speed_factor = number_field(merged, "speed_factor", base.speed_factor);
                    base.noise_level = number_field(merged, "noise_level", base.noise_level);
                    group.profile = base;
                }
                try {
                    group.profile.check();
                } catch (const InvalidArgument& e) {
                    throw ParseError(where, e.what());
                }
                group.count = j.value("count", std::size_t{0});
                if (j.contains("knowledge")) {
                    group.knowledge.clear();
                    const auto& k = j["knowledge"];
                    if (k.is_number() || k.is_array()) {
                        group.knowledge["*"] = k.is_number() ? std::vector<double>{k.get<double>()}
                                                             : k.get<std::vector<double>>();
                    } else if (k.is_object()) {
                        for (const auto& [objective, values] : k.items()) {
                            group.knowledge[objective] = values.is_number() ? std::vector<double>{values.get<double>()}
                                                                            : values.get<std::vector<double>>();
                        }
                    } else {
                        throw ParseError(where, "knowledge must be a number, a list or an object");
                    }
                    for (const auto& [objective, values] : group.knowledge) {
                        if (values.empty()) throw ParseError(where, "knowledge for '" + objective + "' lists no value");
                        for (double v : values) {
                            if (!(v >= 0.0 && v <= 1.0)) throw ParseError(where, "knowledge levels must lie in [0,1]");
                        }
                    }
                }
                cohort.groups.push_back(std::move(group));
            } else {
                throw ParseError(where, "unknown record type '" + type + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where, e.what());
        }
    }
    return cohort;
}

std::string report_to_json(const SimulationReport& r) {
    ordered_json j;
    j["schema_version"] = 1;
    j["n_players"] = r.n_players;
    j["seed"] = r.seed;
    if (r.pedagogical_gain) {
        j["pedagogical_gain"] = {{"mean", r.pedagogical_gain->mean}, {"stddev", r.pedagogical_gain->stddev}};
    } else {
        j["pedagogical_gain"] = nullptr;
    }
    j["attainment_rate"] = ordered_json::object();
    for (const auto& [id, rate] : r.attainment_rate) j["attainment_rate"][id] = rate;
    j["path_frequency"] = ordered_json::object();
    for (const auto& [path, count] : r.path_frequency) j["path_frequency"][path] = count;
    j["truncation_count"] = r.truncation_count;
    return j.dump();
}

std::string gain_summary_jsonl(const SimulationReport& r) {
    std::string out;
    ordered_json summary;
    summary["record"] = "summary";
    summary["schema_version"] = 1;
    summary["n_players"] = r.n_players;
    summary["seed"] = r.seed;
    summary["gain_mean"] = r.pedagogical_gain ? ordered_json(r.pedagogical_gain->mean) : ordered_json(nullptr);
    summary["gain_stddev"] = r.pedagogical_gain ? ordered_json(r.pedagogical_gain->stddev) : ordered_json(nullptr);
    summary["truncation_count"] = r.truncation_count;
    out += summary.dump() + "\n";
    for (const auto& [id, rate] : r.attainment_rate) {
        out += ordered_json{{"record", "attainment"}, {"objective", id}, {"rate", rate}}.dump() + "\n";
    }
    for (const auto& [path, count] : r.path_frequency) {
        out += ordered_json{{"record", "path"}, {"path", path}, {"count", count}}.dump() + "\n";
    }
    return out;
}

std::string gain_summary_text(const SimulationReport& r) {
    if (r.n_players == 0) return "no players simulated\n";
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(4);
    out << "players: " << r.n_players << " (seed " << r.seed << ")\n";
    out << "pedagogical gain: mean " << r.pedagogical_gain->mean << ", stddev " << r.pedagogical_gain->stddev << "\n";
    out << "attainment rate:\n";
    for (const auto& [id, rate] : r.attainment_rate) out << "  " << id << ": " << rate << "\n";
    std::vector<std::pair<std::string, std::size_t>> paths(r.path_frequency.begin(), r.path_frequency.end());
    std::stable_sort(paths.begin(), paths.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    out << "paths (" << paths.size() << " distinct):\n";
    for (const auto& [path, count] : paths) out << "  " << count << "  " << path << "\n";
    out << "truncated traces: " << r.truncation_count << "\n";
    return out.str();
}

}  // namespace sgforge
