#pragma once

// Job core shared by the command line and the HTTP service, so both surfaces
// produce identical payloads for identical inputs.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgforge/diagnostics.hpp"
#include "sgforge/quality_control.hpp"
#include "sgforge/simulation.hpp"
#include "sgforge/storyboard_io.hpp"

namespace sgforge {

enum class JobKind { Validate, Simulate, Paths, Convert };
enum class OutputFormat { Text, Json };

std::string_view to_string(JobKind k);

namespace exit_codes {
inline constexpr int kOk = 0;
inline constexpr int kWarnings = 1;
inline constexpr int kErrors = 2;
inline constexpr int kUsage = 3;
}  // namespace exit_codes

struct JobResult {
    JobKind kind = JobKind::Validate;
    int exit_code = exit_codes::kOk;
    std::vector<Diagnostic> diagnostics;
    std::optional<SimulationReport> report;
    std::optional<PathReport> paths;
    /// Converted document (convert jobs).
    std::optional<std::string> document;
    /// Failure without diagnostics: usage problems (exit 3) or a document
    /// the target dialect cannot represent (exit 2).
    std::optional<std::string> message;
};

/// A storyboard document of either dialect lifted to a Scenario.
struct LoadedScenario {
    DocumentKind kind = DocumentKind::Unknown;
    std::optional<Scenario> scenario;
    /// Parse-level diagnostics; E000 when the document cannot be read at all.
    std::vector<Diagnostic> diagnostics;
};

/// `kind` unset sniffs the root element.
LoadedScenario load_scenario_document(std::string_view bytes, std::optional<DocumentKind> kind = std::nullopt,
                                      const ScenarioDefaults& defaults = {});

struct ValidateOptions {
    PathLimits limits;
};

JobResult run_validate(std::string_view bytes, const ValidateOptions& options = {});

struct SimulateOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_steps;
    unsigned threads = 1;
    /// Server-side caps; unset on the command line.
    std::optional<std::size_t> max_players;
    std::optional<std::size_t> max_steps_cap;
};

JobResult run_simulate(std::string_view scenario_bytes, std::string_view cohort_jsonl,
                       const SimulateOptions& options = {});

JobResult run_paths(std::string_view bytes, const PathLimits& limits = {});

JobResult run_convert(std::string_view bytes, std::optional<DocumentKind> from, DocumentKind to,
                      const ScenarioDefaults& defaults = {});

/// Text or JSON-lines rendering of a job's payload (the converted document
/// for convert jobs). Empty when the job failed with a message only.
std::string render(const JobResult& result, OutputFormat format);

/// JSON-lines records of a path report.
std::string paths_to_jsonl(const PathReport& report);

}  // namespace sgforge
