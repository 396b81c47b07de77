// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "../support/generators.hpp"
#include "../support/service_harness.hpp"
#include "sgforge/jobs.hpp"
#include "sgforge/quality_control.hpp"
#include "sgforge/simulation.hpp"
#include "sgforge/storyboard_io.hpp"

using namespace sgforge;

namespace {

using Clock = std::chrono::steady_clock;

std::string path_of(const std::string& name) { return std::string(SGFORGE_FIXTURES) + "/" + name; }
std::string fixture(const std::string& name) { return gen::read_file(path_of(name)); }

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out.fail(std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    if (budget_s > 0 && elapsed > budget_s) {
        out.fail("took " + std::to_string(elapsed) + " s, budget " + std::to_string(budget_s) + " s");
    }
    std::printf("%s  %-28s %8.3f s  %s\n", out.ok ? "PASS" : "FAIL", name, elapsed, out.detail.c_str());
    if (!out.ok) ++failures;
}

Transition guarded(const char* cond, SceneNum to) { return {parse_condition(cond), to}; }
Transition fallback(SceneNum to) { return {std::nullopt, to}; }

// Objective id quoted in a coverage diagnostic message.
std::string quoted_objective(const std::string& message) {
    const auto start = message.find("objective '");
    if (start == std::string::npos) return {};
    const auto from = start + 11;
    return message.substr(from, message.find('\'', from) - from);
}

Outcome ketteur_golden() {
    Outcome out;
    const auto parsed = parse_legacy(fixture("ketteur_storyboard.xml"));
    const auto s = to_scenario(parsed.storyboard);
    if (s.scenes().size() != 2) out.fail("expected 2 scenes, got " + std::to_string(s.scenes().size()));
    const auto* one = s.find_scene(1);
    const auto* two = s.find_scene(2);
    if (one == nullptr || two == nullptr) {
        out.fail("scenes 1 and 2 not both present");
        return out;
    }
    if (one->transitions != std::vector<Transition>{guarded("&score>15", 2), fallback(1)}) out.fail("scene 1 transitions");
    if (two->transitions != std::vector<Transition>{guarded("&score<10", 1), guarded("&score>15", 3), fallback(2)}) {
        out.fail("scene 2 transitions");
    }
    const auto result = run_validate(fixture("ketteur_storyboard.xml"));
    int e002 = 0;
    for (const auto& d : result.diagnostics) {
        if (d.code == "E002" && d.scene == 2 && d.message.find("scene 3") != std::string::npos) ++e002;
    }
    if (e002 != 1) out.fail("expected one E002 on scene 2 targeting 3");
    if (out.ok) out.detail = "2 scenes, 5 transitions, E002 on target 3";
    return out;
}

Outcome graph_oracle() {
    Outcome out;
    gen::Rng rng(500);
    std::size_t mismatches = 0;
    std::size_t paths_compared = 0;
    std::size_t skipped = 0;
    for (int i = 0; i < 500; ++i) {
        const auto c = gen::random_graph_case(rng);
        const auto g = build_graph(c.scenario);
        if (find_unreachable(g) != oracle::unreachable(c.graph)) ++mismatches;
        if (find_dead_ends(g) != oracle::dead_ends(c.graph)) ++mismatches;
        for (std::size_t unrolls : {0u, 1u}) {
            const std::size_t cap = 50000;
            const auto expected = oracle::paths(c.graph, unrolls, cap);
            const auto actual = enumerate_paths(g, {cap, unrolls});
            if (!expected.complete) {
                if (!actual.truncated) ++mismatches;
                ++skipped;
                continue;
            }
            const std::set<std::vector<SceneNum>> got(actual.paths.begin(), actual.paths.end());
            if (actual.truncated || got != expected.paths || got.size() != actual.paths.size()) ++mismatches;
            paths_compared += expected.paths.size();
        }
    }
    if (mismatches) out.fail(std::to_string(mismatches) + " mismatches");
    out.detail += "500 graphs, " + std::to_string(paths_compared) + " paths compared, " + std::to_string(mismatches) +
                  " mismatches";
    if (skipped) out.detail += ", " + std::to_string(skipped) + " path sets over the cap";
    return out;
}

Outcome condition_soundness() {
    Outcome out;
    gen::Rng rng(1000);
    std::size_t contradictions = 0;
    std::size_t inexact = 0;
    for (int i = 0; i < 1000; ++i) {
        const int lo = gen::uniform_int(rng, -60, 40);
        const int hi = lo + gen::uniform_int(rng, 0, 100);
        const auto e = gen::random_expr(rng, {"x"}, 3, lo - 10, hi + 10);
        const auto verdict =
            satisfiable(gen::to_condition(e), {{"x", Interval{Decimal::from_int(lo), Decimal::from_int(hi)}}});
        const auto ints = oracle::integer_sweep(e, "x", lo, hi);
        if (verdict == Satisfiability::Never && ints.any_true) ++contradictions;
        if (verdict == Satisfiability::Always && ints.any_false) ++contradictions;
        const auto reals = oracle::half_sweep(e, "x", lo, hi);
        const auto exact = reals.any_true && reals.any_false ? Satisfiability::Sometimes
                           : reals.any_true                  ? Satisfiability::Always
                                                             : Satisfiability::Never;
        if (verdict != exact) ++inexact;
    }
    if (contradictions) out.fail(std::to_string(contradictions) + " contradictions");
    if (inexact) out.fail(std::to_string(inexact) + " verdicts differ from the exact half-step sweep");
    if (out.ok) out.detail = "1000 guards, 0 contradictions, 0 inexact verdicts";
    return out;
}

Outcome coverage() {
    Outcome out;
    gen::Rng rng(8);
    std::size_t checked = 0;
    std::size_t mismatches = 0;
    std::size_t warnings = 0;
    std::size_t errors = 0;
    for (int i = 0; i < 400; ++i) {
        const auto c = gen::random_coverage_case(rng, 8);
        const auto& s = c.base.scenario;
        const auto expected_paths = oracle::paths(c.base.graph, 1, 100000);
        if (!expected_paths.complete) continue;
        ValidationOptions options;
        options.limits = {100000, 1};
        const auto result = validate_scenario(s, options);
        if (!result.paths || result.paths->truncated) continue;
        ++checked;

        std::map<std::string, oracle::Verdict> actual;
        for (const auto& d : result.diagnostics) {
            if (d.code == "E011") actual[quoted_objective(d.message)] = oracle::Verdict::Error;
            if (d.code == "W015") actual[quoted_objective(d.message)] = oracle::Verdict::Warning;
        }
        for (const auto& o : s.objectives) {
            std::vector<std::pair<Decimal, Decimal>> per_path;
            for (const auto& path : expected_paths.paths) {
                std::vector<oracle::ScoreStep> steps;
                for (auto scene : path) {
                    auto it = c.effects.find(scene);
                    if (it == c.effects.end()) continue;
                    auto hit = it->second.find(o.id);
                    if (hit != it->second.end()) steps.push_back(hit->second);
                }
                per_path.push_back(oracle::fold(steps, c.mechanisms.at(o.id)));
            }
            const auto expected = oracle::coverage_verdict(per_path, o.threshold);
            const auto found = actual.contains(o.id) ? actual[o.id] : oracle::Verdict::None;
            if (expected != found) ++mismatches;
            if (expected == oracle::Verdict::Warning) ++warnings;
            if (expected == oracle::Verdict::Error) ++errors;
        }
    }
    if (mismatches) out.fail(std::to_string(mismatches) + " mismatches");
    if (checked < 300) out.fail("only " + std::to_string(checked) + " scenarios checked");
    if (out.ok) {
        out.detail = std::to_string(checked) + " scenarios, " + std::to_string(errors) + " E011, " +
                     std::to_string(warnings) + " W015, 0 mismatches";
    }
    return out;
}

Outcome simulation_properties() {
    Outcome out;
    for (const auto* name : {"choices.xml", "gate.xml", "equivalence/generated_1.xml", "equivalence/generated_4.xml"}) {
        const auto v = ValidatedScenario::check(parse_scenario(fixture(name)).scenario);
        auto cohort = parse_cohort(fixture("cohort_mixed.jsonl"));
        const auto one = simulate_cohort(v, cohort, 1);
        const auto rendered = report_to_json(one) + gain_summary_jsonl(one);
        for (unsigned threads : {2u, 4u, 8u}) {
            const auto many = simulate_cohort(v, cohort, threads);
            if (report_to_json(many) + gain_summary_jsonl(many) != rendered) {
                out.fail(std::string(name) + ": report differs at " + std::to_string(threads) + " threads");
            }
        }

        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            for (const auto* preset : {"curious", "prudent", "hasty", "confident"}) {
                const auto trace = simulate_player(v, *preset_profile(preset), {}, seed);
                KnowledgeState previous = trace.initial_knowledge;
                for (const auto& step : trace.steps) {
                    for (const auto& [objective, value] : step.knowledge) {
                        if (value < previous.at(objective)) out.fail(std::string(name) + ": knowledge decreased");
                    }
                    previous = step.knowledge;
                }
            }
        }
    }

    for (const auto* name : {"choices.xml", "gate.xml", "binomial.xml", "coverage_warning.xml", "minimal.xml"}) {
        const auto v = ValidatedScenario::check(parse_scenario(fixture(name)).scenario);
        for (const auto* preset : {"curious", "prudent", "hasty", "confident"}) {
            Cohort cohort;
            cohort.seed = 5;
            auto profile = *preset_profile(preset);
            profile.noise_level = 0.0;
            cohort.groups.push_back({profile, {{"*", {1.0}}}, 50});
            const auto report = simulate_cohort(v, cohort, 4);
            if (!report.pedagogical_gain || report.pedagogical_gain->mean != 0.0) {
                out.fail(std::string(name) + ": saturated gain is not 0");
            }
            for (const auto& [objective, rate] : report.attainment_rate) {
                if (rate != 1.0) out.fail(std::string(name) + ": objective " + objective + " not always attained");
            }
        }
    }
    if (out.ok) out.detail = "thread-invariant reports, monotone knowledge, saturated cohorts attain all";
    return out;
}

Outcome binomial() {
    Outcome out;
    const auto v = ValidatedScenario::check(parse_scenario(fixture("binomial.xml")).scenario);
    const auto cohort = parse_cohort(fixture("binomial_cohort.jsonl"));
    const auto report = simulate_cohort(v, cohort, 0);
    const auto n = report.n_players;
    const auto hits = report.path_frequency.contains("1>2") ? report.path_frequency.at("1>2") : 0;
    if (n != 10000) out.fail("n = " + std::to_string(n));
    if (!oracle::within_sigma(hits, n, 0.5, 3.0)) out.fail("1>2 taken " + std::to_string(hits) + " times");
    out.detail = "1>2 taken " + std::to_string(hits) + " of " + std::to_string(n) + " (3 sigma = 150)";
    return out;
}

Outcome round_trips() {
    Outcome out;
    gen::Rng rng(200);
    std::size_t canonical_failures = 0;
    std::size_t legacy_failures = 0;
    for (int i = 0; i < 200; ++i) {
        const auto s = gen::random_rich_scenario(rng, false);
        const auto bytes = serialize_scenario(s);
        const auto back = parse_scenario(bytes).scenario;
        if (!(back == s) || serialize_scenario(back) != bytes) ++canonical_failures;
    }
    for (int i = 0; i < 200; ++i) {
        const auto s = gen::random_rich_scenario(rng, true);
        const auto back = to_scenario(parse_legacy(export_legacy(s)).storyboard);
        const auto a = s.scenes();
        const auto b = back.scenes();
        bool same = a.size() == b.size();
        for (std::size_t k = 0; same && k < a.size(); ++k) {
            same = a[k]->num == b[k]->num && a[k]->prec == b[k]->prec && a[k]->transitions == b[k]->transitions;
        }
        if (!same) ++legacy_failures;
    }
    if (canonical_failures) out.fail(std::to_string(canonical_failures) + " canonical round-trip failures");
    if (legacy_failures) out.fail(std::to_string(legacy_failures) + " legacy round-trip failures");
    if (out.ok) out.detail = "200 canonical + 200 legacy scenarios";
    return out;
}

Outcome cli_service_equivalence() {
    Outcome out;
    std::vector<std::string> names{"binomial.xml",        "choices.xml",         "coverage_error.xml",
                                   "coverage_warning.xml", "dead_end.xml",        "ketteur_storyboard.xml",
                                   "ketteur_with_scene3.xml", "gate.xml",            "guards.xml",
                                   "legacy_chain.xml",     "minimal.xml",         "unreachable.xml"};
    for (int i = 1; i <= 8; ++i) names.push_back("equivalence/generated_" + std::to_string(i) + ".xml");

    const auto scratch = std::filesystem::temp_directory_path() / ("sgforge_equivalence_" + std::to_string(::getpid()));
    std::filesystem::create_directories(scratch);
    harness::RunningService svc("acceptance");
    std::size_t compared = 0;
    for (const auto& name : names) {
        // legacy fixtures are stored in canonical form
        auto file = path_of(name);
        auto bytes = fixture(name);
        if (detect_document_kind(bytes) == DocumentKind::Legacy) {
            file = (scratch / std::filesystem::path(name).filename()).string();
            const auto converted = harness::run_cli({"convert", path_of(name), "--to", "canonical", "-o", file});
            if (converted.exit_code != 0) {
                out.fail(name + ": convert failed");
                continue;
            }
            bytes = gen::read_file(file);
        }
        const auto id = std::filesystem::path(name).stem().string();
        if (svc.put(id, bytes).empty()) {
            out.fail(name + ": PUT failed");
            continue;
        }

        const auto cli = harness::run_cli({"validate", file, "--format", "json"});
        const auto http = svc.post_json("/api/scenarios/" + id + "/validate");
        if (http["exit_code"] != cli.exit_code || http["diagnostics"] != harness::jsonl_to_array(cli.out)) {
            out.fail(name + ": validate payloads differ");
        }

        const auto cli_sim =
            harness::run_cli({"simulate", file, path_of("cohort_mixed.jsonl"), "--format", "json"});
        const auto http_sim = svc.post_json("/api/scenarios/" + id + "/simulate", fixture("cohort_mixed.jsonl"));
        const auto& payload = http_sim["report"].is_null() ? http_sim["diagnostics"] : http_sim["records"];
        if (http_sim["exit_code"] != cli_sim.exit_code || payload != harness::jsonl_to_array(cli_sim.out)) {
            out.fail(name + ": simulate payloads differ");
        }
        ++compared;
    }
    std::filesystem::remove_all(scratch);
    if (compared != 20) out.fail("compared " + std::to_string(compared) + " scenarios");
    if (out.ok) out.detail = "20 scenarios, validate and simulate identical";
    return out;
}

}  // namespace

int main() {
    criterion("ketteur golden", 0.1, ketteur_golden);
    criterion("graph oracle", 5.0, graph_oracle);
    criterion("condition soundness", 5.0, condition_soundness);
    criterion("coverage oracle", 0, coverage);
    criterion("simulation properties", 0, simulation_properties);
    criterion("binomial routing", 10.0, binomial);
    criterion("round trips", 0, round_trips);
    criterion("cli/service equivalence", 0, cli_service_equivalence);
    std::printf("%d failed\n", failures);
    return failures == 0 ? 0 : 1;
}
