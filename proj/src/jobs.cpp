#include "sgforge/jobs.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace sgforge {

using nlohmann::ordered_json;

std::string_view to_string(JobKind k) {
    switch (k) {
        case JobKind::Validate: return "validate";
        case JobKind::Simulate: return "simulate";
        case JobKind::Paths: return "paths";
        case JobKind::Convert: return "convert";
    }
    return "?";
}

namespace {

bool blocks_lifting(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
        return d.code == codes::kNoStart || d.code == codes::kMultipleStarts;
    });
}

// Parse diagnostics plus the full validation pipeline, sorted.
std::vector<Diagnostic> validate_loaded(const LoadedScenario& loaded, const PathLimits& limits,
                                        ValidationResult* out = nullptr) {
    auto diags = loaded.diagnostics;
    if (loaded.scenario) {
        auto result = validate_scenario(*loaded.scenario, ValidationOptions{limits});
        diags.insert(diags.end(), result.diagnostics.begin(), result.diagnostics.end());
        if (out) *out = std::move(result);
    }
    sort_diagnostics(diags);
    return diags;
}

}  // namespace

LoadedScenario load_scenario_document(std::string_view bytes, std::optional<DocumentKind> kind,
                                      const ScenarioDefaults& defaults) {
    LoadedScenario out;
    out.kind = kind.value_or(detect_document_kind(bytes));
    try {
        switch (out.kind) {
            case DocumentKind::Legacy: {
                auto parsed = parse_legacy(bytes);
                out.diagnostics = std::move(parsed.diagnostics);
                if (!blocks_lifting(out.diagnostics)) out.scenario = to_scenario(parsed.storyboard, defaults);
                break;
            }
            case DocumentKind::Canonical: {
                auto parsed = parse_scenario(bytes);
                out.diagnostics = std::move(parsed.diagnostics);
                out.scenario = std::move(parsed.scenario);
                break;
            }
            case DocumentKind::Unknown:
                out.diagnostics.push_back(make_diagnostic(codes::kUnreadableDocument, std::nullopt,
                                                          "unrecognized document: expected root <scenes> or <scenario>"));
                break;
        }
    } catch (const DiagnosticError& e) {
        out.diagnostics.push_back(e.diagnostic());
        out.scenario.reset();
    } catch (const Error& e) {
        out.diagnostics.push_back(make_diagnostic(codes::kUnreadableDocument, std::nullopt, e.what()));
        out.scenario.reset();
    }
    sort_diagnostics(out.diagnostics);
    return out;
}

JobResult run_validate(std::string_view bytes, const ValidateOptions& options) {
    JobResult r;
    r.kind = JobKind::Validate;
    r.diagnostics = validate_loaded(load_scenario_document(bytes), options.limits);
    r.exit_code = exit_code_for(r.diagnostics);
    return r;
}

JobResult run_simulate(std::string_view scenario_bytes, std::string_view cohort_jsonl, const SimulateOptions& options) {
    JobResult r;
    r.kind = JobKind::Simulate;
    const auto loaded = load_scenario_document(scenario_bytes);
    r.diagnostics = validate_loaded(loaded, PathLimits{});
    if (!loaded.scenario || has_errors(r.diagnostics)) {
        r.exit_code = exit_codes::kErrors;
        return r;
    }
    Cohort cohort;
    try {
        cohort = parse_cohort(cohort_jsonl);
    } catch (const Error& e) {
        r.message = std::string("cohort: ") + e.what();
        r.exit_code = exit_codes::kUsage;
        return r;
    }
    if (options.seed) cohort.seed = *options.seed;
    if (options.max_steps) cohort.params.max_steps = *options.max_steps;
    if (options.max_players && cohort.size() > *options.max_players) {
        r.message = "cohort of " + std::to_string(cohort.size()) + " players exceeds the limit of " +
                    std::to_string(*options.max_players);
        r.exit_code = exit_codes::kUsage;
        return r;
    }
    if (options.max_steps_cap && cohort.params.max_steps > *options.max_steps_cap) {
        r.message = "max_steps " + std::to_string(cohort.params.max_steps) + " exceeds the limit of " +
                    std::to_string(*options.max_steps_cap);
        r.exit_code = exit_codes::kUsage;
        return r;
    }
    try {
        const auto validated = ValidatedScenario::check(*loaded.scenario);
        r.report = simulate_cohort(validated, cohort, options.threads);
    } catch (const DiagnosticError& e) {
        r.diagnostics.push_back(e.diagnostic());
        sort_diagnostics(r.diagnostics);
        r.exit_code = exit_codes::kErrors;
        return r;
    }
    r.exit_code = exit_codes::kOk;
    return r;
}

JobResult run_paths(std::string_view bytes, const PathLimits& limits) {
    JobResult r;
    r.kind = JobKind::Paths;
    const auto loaded = load_scenario_document(bytes);
    ValidationResult validation;
    r.diagnostics = validate_loaded(loaded, limits, &validation);
    if (!validation.graph || has_errors(r.diagnostics)) {
        r.exit_code = exit_codes::kErrors;
        return r;
    }
    auto report = validation.paths ? *validation.paths : enumerate_paths(*validation.graph, limits);
    if (report.scores.size() != report.paths.size()) score_paths(*loaded.scenario, report);
    r.exit_code = report.truncated ? exit_codes::kWarnings : exit_codes::kOk;
    r.paths = std::move(report);
    return r;
}

JobResult run_convert(std::string_view bytes, std::optional<DocumentKind> from, DocumentKind to,
                      const ScenarioDefaults& defaults) {
    JobResult r;
    r.kind = JobKind::Convert;
    if (to == DocumentKind::Unknown) {
        r.message = "unknown target dialect";
        r.exit_code = exit_codes::kUsage;
        return r;
    }
    auto loaded = load_scenario_document(bytes, from, defaults);
    r.diagnostics = loaded.diagnostics;
    if (!loaded.scenario) {
        r.exit_code = exit_codes::kErrors;
        return r;
    }
    try {
        r.document = to == DocumentKind::Canonical ? serialize_scenario(*loaded.scenario) : export_legacy(*loaded.scenario);
    } catch (const NotRepresentable& e) {
        r.message = std::string("not representable in the legacy dialect: ") + e.what();
        r.exit_code = exit_codes::kErrors;
        return r;
    }
    r.exit_code = exit_codes::kOk;
    return r;
}

std::string paths_to_jsonl(const PathReport& report) {
    std::string out;
    for (std::size_t i = 0; i < report.paths.size(); ++i) {
        ordered_json j;
        j["record"] = "path";
        j["scenes"] = report.paths[i];
        ordered_json scores = ordered_json::object();
        if (i < report.scores.size()) {
            for (const auto& [objective, bounds] : report.scores[i]) {
                scores[objective] = {{"pessimistic", bounds.pessimistic.to_double()},
                                     {"optimistic", bounds.optimistic.to_double()}};
            }
        }
        j["scores"] = std::move(scores);
        out += j.dump() + "\n";
    }
    out += ordered_json{{"record", "summary"}, {"paths", report.paths.size()}, {"truncated", report.truncated}}.dump() +
           "\n";
    return out;
}

namespace {

std::string paths_to_text(const PathReport& report) {
    std::ostringstream out;
    for (std::size_t i = 0; i < report.paths.size(); ++i) {
        out << path_key(report.paths[i]);
        if (i < report.scores.size()) {
            for (const auto& [objective, bounds] : report.scores[i]) {
                out << "  " << objective << "=[" << bounds.pessimistic.to_string() << ", "
                    << bounds.optimistic.to_string() << "]";
            }
        }
        out << "\n";
    }
    out << report.paths.size() << (report.paths.size() == 1 ? " path" : " paths");
    if (report.truncated) out << " (truncated)";
    out << "\n";
    return out.str();
}

}  // namespace

std::string render(const JobResult& result, OutputFormat format) {
    const bool json = format == OutputFormat::Json;
    switch (result.kind) {
        case JobKind::Simulate:
            if (result.report) return json ? gain_summary_jsonl(*result.report) : gain_summary_text(*result.report);
            break;
        case JobKind::Paths:
            if (result.paths) return json ? paths_to_jsonl(*result.paths) : paths_to_text(*result.paths);
            break;
        case JobKind::Convert:
            if (result.document) return *result.document;
            break;
        case JobKind::Validate:
            break;
    }
    if (result.message) return {};
    return json ? diagnostics_to_jsonl(result.diagnostics) : diagnostics_to_text(result.diagnostics);
}

}  // namespace sgforge
