#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgforge/errors.hpp"
#include "sgforge/scenario.hpp"

namespace sgforge {

enum class Severity { Error, Warning };

std::string_view to_string(Severity s);

/// Registered diagnostic codes. docs/diagnostics.md is the reference.
namespace codes {
inline constexpr std::string_view kUnreadableDocument = "E000";
inline constexpr std::string_view kDuplicateScene = "E001";
inline constexpr std::string_view kDanglingTarget = "E002";
inline constexpr std::string_view kNoStart = "E003";
inline constexpr std::string_view kMultipleStarts = "E004";
inline constexpr std::string_view kMissingFallback = "E005";
inline constexpr std::string_view kUnreachable = "E006";
inline constexpr std::string_view kUnreachablePruned = "W006";
inline constexpr std::string_view kDeadEnd = "E007";
inline constexpr std::string_view kUndeclaredVariable = "E008";
inline constexpr std::string_view kUnsatisfiableGuard = "E009";
inline constexpr std::string_view kShadowedGuard = "W010";
inline constexpr std::string_view kCoverageImpossible = "E011";
inline constexpr std::string_view kPrecInconsistent = "W012";
inline constexpr std::string_view kDanglingActivity = "E013";
inline constexpr std::string_view kUnknownMarkup = "W014";
inline constexpr std::string_view kCoverageNotGuaranteed = "W015";
inline constexpr std::string_view kInvalidDeclaration = "E016";
inline constexpr std::string_view kMarkupRecovered = "W016";
}  // namespace codes

struct CodeInfo {
    std::string_view code;
    Severity severity;
    std::string_view summary;
};

const std::vector<CodeInfo>& diagnostic_registry();
const CodeInfo* find_code(std::string_view code);

struct Diagnostic {
    std::string code;
    Severity severity = Severity::Error;
    std::optional<SceneNum> scene;
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Severity is taken from the registry.
Diagnostic make_diagnostic(std::string_view code, std::optional<SceneNum> scene, std::string message);

/// Stable order: code, then scene (absent first), then message. Exact
/// duplicates are dropped.
void sort_diagnostics(std::vector<Diagnostic>& diagnostics);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// 0 clean, 1 warnings only, 2 any error.
int exit_code_for(const std::vector<Diagnostic>& diagnostics);

/// One JSON object per line: {"code","severity","scene","message"}.
std::string diagnostics_to_jsonl(const std::vector<Diagnostic>& diagnostics);
std::string diagnostics_to_text(const std::vector<Diagnostic>& diagnostics);

/// Raised when an operation cannot proceed because of a blocking diagnostic.
class DiagnosticError : public Error {
public:
    explicit DiagnosticError(Diagnostic d) : Error(d.code + ": " + d.message), diagnostic_(std::move(d)) {}
    const Diagnostic& diagnostic() const { return diagnostic_; }

private:
    Diagnostic diagnostic_;
};

/// Structural well-formedness of a scenario: E001 E002 E003 E004 E005 E008
/// E013 E016 W012. Each violation yields exactly one diagnostic.
std::vector<Diagnostic> check_structure(const Scenario& scenario);

}  // namespace sgforge
