#pragma once

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "sgforge/scenario.hpp"

namespace sgforge {

enum class AdaptationLevel { InterfaceOnly, Template, SourceAccess };
enum class ProgrammingKnowledge { None, Scripting, Programmer };

std::string_view to_string(AdaptationLevel a);
std::string_view to_string(ProgrammingKnowledge k);
std::optional<AdaptationLevel> parse_adaptation_level(std::string_view text);
std::optional<ProgrammingKnowledge> parse_programming_knowledge(std::string_view text);

struct ActivityDescriptor {
    std::string id;
    std::string name;
    Grain grain = Grain::MicroActivity;
    /// Free tag: crossword, puzzle, voting, brainstorming, ...
    std::string kind;
    std::string use_characteristics;
    std::vector<std::string> objectives_addressed;

    friend bool operator==(const ActivityDescriptor&, const ActivityDescriptor&) = default;
};

struct EditorDescriptor {
    std::string id;
    std::string name;
    std::vector<std::string> applicable_kinds;
    AdaptationLevel adaptation_level = AdaptationLevel::InterfaceOnly;
    ProgrammingKnowledge min_programming_knowledge = ProgrammingKnowledge::None;

    friend bool operator==(const EditorDescriptor&, const EditorDescriptor&) = default;
};

struct ExpertProfile {
    ProgrammingKnowledge programming_knowledge = ProgrammingKnowledge::None;
    AdaptationLevel desired_adaptation = AdaptationLevel::InterfaceOnly;
};

struct ActivityFilter {
    std::optional<Grain> grain;
    std::optional<std::string> kind;
};

/// Catalog of activity and editor metadata. Writes are serialized; reads
/// take a shared lock and see a consistent snapshot.
class ActivityRegistry {
public:
    ActivityRegistry() = default;
    ActivityRegistry(const ActivityRegistry& other);
    ActivityRegistry& operator=(const ActivityRegistry& other);

    /// Throws DuplicateId or InvalidArgument (empty id, no applicable kinds).
    std::string register_activity(ActivityDescriptor descriptor);
    std::string register_editor(EditorDescriptor descriptor);

    std::optional<ActivityDescriptor> activity(std::string_view id) const;
    std::optional<EditorDescriptor> editor(std::string_view id) const;

    /// Sorted by id; filters are conjunctive.
    std::vector<ActivityDescriptor> list_activities(const ActivityFilter& filter = {}) const;
    std::vector<EditorDescriptor> list_editors() const;

    /// Editors applicable to `kind` whose knowledge requirement the expert
    /// meets, ranked by |adaptation - desired| and then id.
    std::vector<EditorDescriptor> find_editors(std::string_view kind, const ExpertProfile& expert) const;

    /// Catalog XML (docs/formats.md).
    std::string to_xml() const;
    /// Throws ParseError / DuplicateId.
    static ActivityRegistry from_xml(std::string_view bytes);

    void save(const std::filesystem::path& file) const;
    /// A missing file yields an empty registry.
    static ActivityRegistry load(const std::filesystem::path& file);

private:
    mutable std::shared_mutex mutex_;
    std::vector<ActivityDescriptor> activities_;  // sorted by id
    std::vector<EditorDescriptor> editors_;       // sorted by id
};

}  // namespace sgforge
