#include "sgforge/diagnostics.hpp"

#include <algorithm>
#include <tuple>

#include "json.hpp"

namespace sgforge {

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

const std::vector<CodeInfo>& diagnostic_registry() {
    static const std::vector<CodeInfo> registry{
        {codes::kUnreadableDocument, Severity::Error, "document cannot be parsed"},
        {codes::kDuplicateScene, Severity::Error, "duplicate scene num"},
        {codes::kDanglingTarget, Severity::Error, "transition targets an undefined scene"},
        {codes::kNoStart, Severity::Error, "no start scene (prec=0)"},
        {codes::kMultipleStarts, Severity::Error, "more than one start scene"},
        {codes::kMissingFallback, Severity::Error, "guarded transitions without exactly one trailing fallback"},
        {codes::kUnreachable, Severity::Error, "scene unreachable from the start scene"},
        {codes::kUnreachablePruned, Severity::Warning, "scene reachable only through unsatisfiable guards"},
        {codes::kDeadEnd, Severity::Error, "reachable scene from which no terminal scene is reachable"},
        {codes::kUndeclaredVariable, Severity::Error, "guard uses an undeclared variable"},
        {codes::kUnsatisfiableGuard, Severity::Error, "guard can never hold within the declared ranges"},
        {codes::kShadowedGuard, Severity::Warning, "guard implied by earlier guards on the same scene"},
        {codes::kCoverageImpossible, Severity::Error, "principal objective cannot be attained on some path"},
        {codes::kPrecInconsistent, Severity::Warning, "prec is not a graph predecessor"},
        {codes::kDanglingActivity, Severity::Error, "scene references an undeclared activity"},
        {codes::kUnknownMarkup, Severity::Warning, "unknown attribute or element (preserved)"},
        {codes::kCoverageNotGuaranteed, Severity::Warning, "principal objective not guaranteed on some path"},
        {codes::kInvalidDeclaration, Severity::Error, "invalid or dangling declaration"},
        {codes::kMarkupRecovered, Severity::Warning, "malformed markup recovered in a legacy file"},
    };
    return registry;
}

const CodeInfo* find_code(std::string_view code) {
    for (const auto& info : diagnostic_registry()) {
        if (info.code == code) return &info;
    }
    return nullptr;
}

Diagnostic make_diagnostic(std::string_view code, std::optional<SceneNum> scene, std::string message) {
    const auto* info = find_code(code);
    return Diagnostic{std::string(code), info ? info->severity : Severity::Error, scene, std::move(message)};
}

void sort_diagnostics(std::vector<Diagnostic>& diagnostics) {
    auto key = [](const Diagnostic& d) {
        return std::make_tuple(std::string_view(d.code), d.scene.has_value(), d.scene.value_or(0),
                               std::string_view(d.message));
    };
    std::sort(diagnostics.begin(), diagnostics.end(),
              [&](const Diagnostic& a, const Diagnostic& b) { return key(a) < key(b); });
    diagnostics.erase(std::unique(diagnostics.begin(), diagnostics.end()), diagnostics.end());
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

int exit_code_for(const std::vector<Diagnostic>& diagnostics) {
    if (has_errors(diagnostics)) return 2;
    return diagnostics.empty() ? 0 : 1;
}

std::string diagnostics_to_jsonl(const std::vector<Diagnostic>& diagnostics) {
    std::string out;
    for (const auto& d : diagnostics) {
        nlohmann::ordered_json j;
        j["code"] = d.code;
        j["severity"] = to_string(d.severity);
        j["scene"] = d.scene ? nlohmann::ordered_json(*d.scene) : nlohmann::ordered_json(nullptr);
        j["message"] = d.message;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string diagnostics_to_text(const std::vector<Diagnostic>& diagnostics) {
    std::string out;
    for (const auto& d : diagnostics) {
        out += d.code;
        out += ' ';
        out += to_string(d.severity);
        if (d.scene) out += " [scene " + std::to_string(*d.scene) + "]";
        out += ": ";
        out += d.message;
        out += '\n';
    }
    if (diagnostics.empty()) out = "no diagnostics\n";
    return out;
}

}  // namespace sgforge
