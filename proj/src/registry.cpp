#include "sgforge/registry.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

#include "sgforge/errors.hpp"
#include "sgforge/xml.hpp"

namespace sgforge {

std::string_view to_string(AdaptationLevel a) {
    switch (a) {
        case AdaptationLevel::InterfaceOnly: return "interface-only";
        case AdaptationLevel::Template: return "template";
        case AdaptationLevel::SourceAccess: return "source-access";
    }
    return "?";
}

std::string_view to_string(ProgrammingKnowledge k) {
    switch (k) {
        case ProgrammingKnowledge::None: return "none";
        case ProgrammingKnowledge::Scripting: return "scripting";
        case ProgrammingKnowledge::Programmer: return "programmer";
    }
    return "?";
}

std::optional<AdaptationLevel> parse_adaptation_level(std::string_view text) {
    for (auto a : {AdaptationLevel::InterfaceOnly, AdaptationLevel::Template, AdaptationLevel::SourceAccess}) {
        if (to_string(a) == text) return a;
    }
    return std::nullopt;
}

std::optional<ProgrammingKnowledge> parse_programming_knowledge(std::string_view text) {
    for (auto k : {ProgrammingKnowledge::None, ProgrammingKnowledge::Scripting, ProgrammingKnowledge::Programmer}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

ActivityRegistry::ActivityRegistry(const ActivityRegistry& other) {
    std::shared_lock lock(other.mutex_);
    activities_ = other.activities_;
    editors_ = other.editors_;
}

ActivityRegistry& ActivityRegistry::operator=(const ActivityRegistry& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_);
    std::shared_lock other_lock(other.mutex_);
    activities_ = other.activities_;
    editors_ = other.editors_;
    return *this;
}

namespace {

template <typename T>
typename std::vector<T>::const_iterator find_by_id(const std::vector<T>& items, std::string_view id) {
    auto it = std::lower_bound(items.begin(), items.end(), id, [](const T& item, std::string_view key) { return item.id < key; });
    return it != items.end() && it->id == id ? it : items.end();
}

template <typename T>
std::string insert_sorted(std::vector<T>& items, T item, std::string_view what) {
    if (item.id.empty()) throw InvalidArgument(std::string(what) + " id must not be empty");
    auto it = std::lower_bound(items.begin(), items.end(), item.id, [](const T& x, const std::string& key) { return x.id < key; });
    if (it != items.end() && it->id == item.id) throw DuplicateId(std::string(what) + " '" + item.id + "' already registered");
    std::string id = item.id;
    items.insert(it, std::move(item));
    return id;
}

std::string required(const XmlElement& el, std::string_view key, const std::string& path) {
    const auto* v = el.attribute(key);
    if (v == nullptr) throw ParseError(path, "missing attribute " + std::string(key));
    return *v;
}

}  // namespace

std::string ActivityRegistry::register_activity(ActivityDescriptor descriptor) {
    std::scoped_lock lock(mutex_);
    return insert_sorted(activities_, std::move(descriptor), "activity");
}

std::string ActivityRegistry::register_editor(EditorDescriptor descriptor) {
    if (descriptor.applicable_kinds.empty()) {
        throw InvalidArgument("editor '" + descriptor.id + "' must apply to at least one activity kind");
    }
    std::scoped_lock lock(mutex_);
    return insert_sorted(editors_, std::move(descriptor), "editor");
}

std::optional<ActivityDescriptor> ActivityRegistry::activity(std::string_view id) const {
    std::shared_lock lock(mutex_);
    auto it = find_by_id(activities_, id);
    return it == activities_.end() ? std::nullopt : std::optional(*it);
}

std::optional<EditorDescriptor> ActivityRegistry::editor(std::string_view id) const {
    std::shared_lock lock(mutex_);
    auto it = find_by_id(editors_, id);
    return it == editors_.end() ? std::nullopt : std::optional(*it);
}

std::vector<ActivityDescriptor> ActivityRegistry::list_activities(const ActivityFilter& filter) const {
    std::shared_lock lock(mutex_);
    std::vector<ActivityDescriptor> out;
    for (const auto& a : activities_) {
        if (filter.grain && a.grain != *filter.grain) continue;
        if (filter.kind && a.kind != *filter.kind) continue;
        out.push_back(a);
    }
    return out;
}

std::vector<EditorDescriptor> ActivityRegistry::list_editors() const {
    std::shared_lock lock(mutex_);
    return editors_;
}

std::vector<EditorDescriptor> ActivityRegistry::find_editors(std::string_view kind, const ExpertProfile& expert) const {
    std::vector<EditorDescriptor> out;
    {
        std::shared_lock lock(mutex_);
        for (const auto& e : editors_) {
            const bool applies = std::find(e.applicable_kinds.begin(), e.applicable_kinds.end(), kind) != e.applicable_kinds.end();
            if (applies && e.min_programming_knowledge <= expert.programming_knowledge) out.push_back(e);
        }
    }
    auto distance = [&](const EditorDescriptor& e) {
        return std::abs(static_cast<int>(e.adaptation_level) - static_cast<int>(expert.desired_adaptation));
    };
    std::stable_sort(out.begin(), out.end(), [&](const EditorDescriptor& a, const EditorDescriptor& b) {
        const int da = distance(a);
        const int db = distance(b);
        return da != db ? da < db : a.id < b.id;
    });
    return out;
}

std::string ActivityRegistry::to_xml() const {
    std::shared_lock lock(mutex_);
    XmlElement root;
    root.name = "catalog";
    root.attributes = {{"schema_version", "1"}};
    for (const auto& a : activities_) {
        XmlElement el;
        el.name = "activity";
        el.attributes = {{"id", a.id}, {"name", a.name}, {"grain", std::string(to_string(a.grain))}, {"kind", a.kind}};
        if (!a.use_characteristics.empty()) el.attributes.emplace_back("use", a.use_characteristics);
        for (const auto& objective : a.objectives_addressed) {
            XmlElement addr;
            addr.name = "addresses";
            addr.attributes = {{"objective", objective}};
            el.children.push_back(std::move(addr));
        }
        root.children.push_back(std::move(el));
    }
    for (const auto& e : editors_) {
        XmlElement el;
        el.name = "editor";
        el.attributes = {{"id", e.id},
                         {"name", e.name},
                         {"adaptation", std::string(to_string(e.adaptation_level))},
                         {"min-knowledge", std::string(to_string(e.min_programming_knowledge))}};
        for (const auto& kind : e.applicable_kinds) {
            XmlElement k;
            k.name = "applies-to";
            k.attributes = {{"kind", kind}};
            el.children.push_back(std::move(k));
        }
        root.children.push_back(std::move(el));
    }
    return write_xml(root);
}

ActivityRegistry ActivityRegistry::from_xml(std::string_view bytes) {
    const auto doc = parse_xml(bytes);
    if (doc.root.name != "catalog") throw ParseError("/" + doc.root.name, "expected root element <catalog>");
    ActivityRegistry registry;
    int index = 0;
    for (const auto& el : doc.root.children) {
        const auto path = "/catalog/" + el.name + "[" + std::to_string(++index) + "]";
        if (el.name == "activity") {
            ActivityDescriptor a;
            a.id = required(el, "id", path);
            a.name = el.attribute("name") ? *el.attribute("name") : "";
            const auto grain_text = required(el, "grain", path);
            auto grain = parse_grain(grain_text);
            if (!grain) throw ParseError(path, "unknown grain '" + grain_text + "'");
            a.grain = *grain;
            a.kind = el.attribute("kind") ? *el.attribute("kind") : "";
            a.use_characteristics = el.attribute("use") ? *el.attribute("use") : "";
            for (const auto& child : el.children) {
                if (child.name == "addresses") a.objectives_addressed.push_back(required(child, "objective", path));
            }
            registry.register_activity(std::move(a));
        } else if (el.name == "editor") {
            EditorDescriptor e;
            e.id = required(el, "id", path);
            e.name = el.attribute("name") ? *el.attribute("name") : "";
            const auto adaptation_text = required(el, "adaptation", path);
            auto adaptation = parse_adaptation_level(adaptation_text);
            if (!adaptation) throw ParseError(path, "unknown adaptation level '" + adaptation_text + "'");
            e.adaptation_level = *adaptation;
            const auto knowledge_text = required(el, "min-knowledge", path);
            auto knowledge = parse_programming_knowledge(knowledge_text);
            if (!knowledge) throw ParseError(path, "unknown programming knowledge '" + knowledge_text + "'");
            e.min_programming_knowledge = *knowledge;
            for (const auto& child : el.children) {
                if (child.name == "applies-to") e.applicable_kinds.push_back(required(child, "kind", path));
            }
            try {
                registry.register_editor(std::move(e));
            } catch (const InvalidArgument& ex) {
                throw ParseError(path, ex.what());
            }
        } else {
            throw ParseError(path, "unexpected element <" + el.name + ">");
        }
    }
    return registry;
}

void ActivityRegistry::save(const std::filesystem::path& file) const {
    const auto bytes = to_xml();
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << bytes;
        if (!out) throw Error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

ActivityRegistry ActivityRegistry::load(const std::filesystem::path& file) {
    if (!std::filesystem::exists(file)) return {};
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot read " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_xml(buf.str());
}

}  // namespace sgforge
