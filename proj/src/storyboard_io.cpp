#include "sgforge/storyboard_io.hpp"

#include <algorithm>
#include <charconv>
#include <initializer_list>
#include <map>
#include <sstream>

#include "sgforge/errors.hpp"
#include "sgforge/xml.hpp"

namespace sgforge {

namespace {

std::optional<long long> parse_integer(std::string_view text) {
    long long value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
    return value;
}

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::istringstream in{std::string(text)};
    for (std::string w; in >> w;) words.push_back(w);
    return words;
}

std::string join_words(const auto& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Legacy dialect

// Splits "suiv12" into ("suiv", 12). Returns nullopt when the name is not an
// indexed attribute of the given family; throws on malformed digits.
std::optional<int> indexed_attribute(std::string_view name, std::string_view family, const std::string& path) {
    if (name.substr(0, family.size()) != family) return std::nullopt;
    const std::string_view digits = name.substr(family.size());
    if (digits.empty()) return family == "condition" ? std::optional<int>(1) : std::nullopt;
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return std::nullopt;
    }
    if (digits.front() == '0' || digits.size() > 6) throw ParseError(path, "malformed index in attribute " + std::string(name));
    return std::stoi(std::string(digits));
}

LegacyScene read_legacy_scene(const XmlElement& el, const std::string& path, std::vector<Diagnostic>& diags) {
    LegacyScene scene;
    bool have_num = false;
    bool have_prec = false;
    std::map<int, std::string> conditions;
    std::map<int, SceneNum> targets;
    std::vector<std::string> unknown;

    for (const auto& [key, value] : el.attributes) {
        if (key == "num" || key == "prec") {
            auto n = parse_integer(value);
            if (!n) throw ParseError(path, "attribute " + key + "=\"" + value + "\" is not an integer");
            (key == "num" ? scene.num : scene.prec) = *n;
            (key == "num" ? have_num : have_prec) = true;
        } else if (key == "chemin") {
            scene.chemin = value;
        } else if (key == "description") {
            scene.description = value;
        } else if (auto k = indexed_attribute(key, "condition", path)) {
            if (!conditions.emplace(*k, value).second) {
                throw ParseError(path, "duplicate condition index " + std::to_string(*k));
            }
        } else if (auto k2 = indexed_attribute(key, "suiv", path)) {
            auto n = parse_integer(value);
            if (!n) throw ParseError(path, "attribute " + key + "=\"" + value + "\" is not an integer");
            if (!targets.emplace(*k2, *n).second) throw ParseError(path, "duplicate suiv index " + std::to_string(*k2));
        } else {
            scene.ext.attributes.emplace_back(key, value);
            unknown.push_back(key);
        }
    }
    if (!have_num) throw ParseError(path, "missing attribute num");
    if (!have_prec) throw ParseError(path, "missing attribute prec");

    int expected = 1;
    for (const auto& [k, target] : targets) {
        if (k != expected++) throw ParseError(path, "suiv indices are not contiguous from 1 (found suiv" + std::to_string(k) + ")");
    }
    for (const auto& [k, text] : conditions) {
        if (!targets.contains(k)) throw ParseError(path, "condition" + std::to_string(k) + " has no matching suiv" + std::to_string(k));
    }
    for (const auto& [k, target] : targets) {
        LegacyTransition t;
        t.target = target;
        if (auto it = conditions.find(k); it != conditions.end()) {
            try {
                t.guard = parse_condition(it->second);
            } catch (const ConditionSyntaxError& e) {
                throw ParseError(path, "condition" + std::to_string(k) + " \"" + it->second + "\": " + e.what());
            }
            t.guard_text = it->second;
        }
        scene.transitions.push_back(std::move(t));
    }

    for (const auto& key : unknown) {
        diags.push_back(make_diagnostic(codes::kUnknownMarkup, scene.num,
                                        path + ": unknown attribute '" + key + "' preserved"));
    }
    for (const auto& child : el.children) {
        scene.ext.elements.push_back(child);
        diags.push_back(make_diagnostic(codes::kUnknownMarkup, scene.num,
                                        path + ": unknown element <" + child.name + "> preserved"));
    }
    return scene;
}

std::vector<Diagnostic> start_diagnostics(const std::vector<SceneNum>& starts) {
    std::vector<Diagnostic> out;
    if (starts.empty()) {
        out.push_back(make_diagnostic(codes::kNoStart, std::nullopt, "no scene has prec=0"));
    } else if (starts.size() > 1) {
        std::vector<std::string> names;
        for (auto n : starts) names.push_back(std::to_string(n));
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
        out.push_back(make_diagnostic(codes::kMultipleStarts, std::nullopt, "several start scenes: " + list));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Canonical dialect

class CanonicalReader {
public:
    ScenarioParseResult read(std::string_view bytes) {
        const auto doc = parse_xml(bytes);
        const auto& root = doc.root;
        if (root.name != "scenario") throw ParseError("/" + root.name, "expected root element <scenario>");
        const std::string path = "/scenario";

        ScenarioParseResult result;
        Scenario& s = result.scenario;
        s.id = required(root, "id", path);
        s.title = optional_attr(root, "title").value_or("");
        s.ext.attributes = unknown_attributes(root, path, {"id", "title", "schema_version"});

        std::map<std::string, int> seen_sections;
        for (const auto& child : root.children) {
            const std::string child_path = path + "/" + child.name;
            if (++seen_sections[child.name] > 1 && is_section(child.name)) {
                throw ParseError(child_path, "section appears more than once");
            }
            if (child.name == "objectives") read_objectives(child, child_path, s);
            else if (child.name == "variables") read_variables(child, child_path, s);
            else if (child.name == "activities") read_activities(child, child_path, s);
            else if (child.name == "toolbar") read_toolbar(child, child_path, s);
            else if (child.name == "learner-profile") read_profile(child, child_path, s);
            else if (child.name == "acts") read_acts(child, child_path, s);
            else unknown_element(child, path, s.ext, std::nullopt);
        }

        result.diagnostics = std::move(diags_);
        for (auto& d : check_structure(s)) result.diagnostics.push_back(std::move(d));
        sort_diagnostics(result.diagnostics);
        return result;
    }

private:
    static bool is_section(const std::string& name) {
        return name == "objectives" || name == "variables" || name == "activities" || name == "toolbar" ||
               name == "learner-profile" || name == "acts";
    }

    static std::string required(const XmlElement& el, std::string_view key, const std::string& path) {
        const auto* v = el.attribute(key);
        if (v == nullptr) throw ParseError(path, "missing attribute " + std::string(key));
        return *v;
    }

    static std::optional<std::string> optional_attr(const XmlElement& el, std::string_view key) {
        const auto* v = el.attribute(key);
        return v ? std::optional<std::string>(*v) : std::nullopt;
    }

    static Decimal decimal_attr(const XmlElement& el, std::string_view key, const std::string& path,
                                std::optional<Decimal> fallback = std::nullopt) {
        const auto* v = el.attribute(key);
        if (v == nullptr) {
            if (fallback) return *fallback;
            throw ParseError(path, "missing attribute " + std::string(key));
        }
        auto d = Decimal::parse(*v);
        if (!d) throw ParseError(path, "attribute " + std::string(key) + "=\"" + *v + "\" is not a decimal number");
        return *d;
    }

    static SceneNum integer_attr(const XmlElement& el, std::string_view key, const std::string& path) {
        const auto text = required(el, key, path);
        auto n = parse_integer(text);
        if (!n) throw ParseError(path, "attribute " + std::string(key) + "=\"" + text + "\" is not an integer");
        return *n;
    }

    std::vector<std::pair<std::string, std::string>> unknown_attributes(const XmlElement& el, const std::string& path,
                                                                        std::initializer_list<std::string_view> known,
                                                                        std::optional<SceneNum> scene = std::nullopt) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& [k, v] : el.attributes) {
            if (std::find(known.begin(), known.end(), k) != known.end()) continue;
            out.emplace_back(k, v);
            diags_.push_back(make_diagnostic(codes::kUnknownMarkup, scene, path + ": unknown attribute '" + k + "' preserved"));
        }
        return out;
    }

    // Unknown attributes on elements that have no extension slot.
    void ignored_attributes(const XmlElement& el, const std::string& path, std::initializer_list<std::string_view> known,
                            std::optional<SceneNum> scene = std::nullopt) {
        for (const auto& [k, v] : el.attributes) {
            if (std::find(known.begin(), known.end(), k) != known.end()) continue;
            diags_.push_back(make_diagnostic(codes::kUnknownMarkup, scene, path + ": unknown attribute '" + k + "' ignored"));
        }
    }

    void unknown_element(const XmlElement& el, const std::string& parent_path, Extensions& ext,
                         std::optional<SceneNum> scene) {
        ext.elements.push_back(el);
        diags_.push_back(make_diagnostic(codes::kUnknownMarkup, scene,
                                         parent_path + ": unknown element <" + el.name + "> preserved"));
    }

    // Unknown children of a section element are reported but cannot be kept.
    void foreign_child(const XmlElement& el, const std::string& parent_path) {
        diags_.push_back(make_diagnostic(codes::kUnknownMarkup, std::nullopt,
                                         parent_path + ": unexpected element <" + el.name + "> ignored"));
    }

    static std::string indexed(const std::string& path, const std::string& name, int index) {
        return path + "/" + name + "[" + std::to_string(index) + "]";
    }

    void read_objectives(const XmlElement& el, const std::string& path, Scenario& s) {
        s.principal_objectives = split_words(optional_attr(el, "principal").value_or(""));
        ignored_attributes(el, path, {"principal"});
        int i = 0;
        for (const auto& child : el.children) {
            if (child.name != "objective") {
                foreign_child(child, path);
                continue;
            }
            const auto p = indexed(path, "objective", ++i);
            PedagogicalObjective o;
            o.id = required(child, "id", p);
            o.name = optional_attr(child, "name").value_or("");
            o.threshold = decimal_attr(child, "threshold", p, Decimal{});
            o.ext.attributes = unknown_attributes(child, p, {"id", "name", "threshold"});
            for (const auto& grandchild : child.children) unknown_element(grandchild, p, o.ext, std::nullopt);
            s.objectives.push_back(std::move(o));
        }
    }

    void read_variables(const XmlElement& el, const std::string& path, Scenario& s) {
        ignored_attributes(el, path, {});
        int i = 0;
        for (const auto& child : el.children) {
            if (child.name != "variable") {
                foreign_child(child, path);
                continue;
            }
            const auto p = indexed(path, "variable", ++i);
            VariableDecl v;
            v.name = required(child, "name", p);
            v.initial = decimal_attr(child, "initial", p, Decimal{});
            v.range.lo = decimal_attr(child, "lo", p);
            v.range.hi = decimal_attr(child, "hi", p);
            v.ext.attributes = unknown_attributes(child, p, {"name", "initial", "lo", "hi"});
            for (const auto& grandchild : child.children) unknown_element(grandchild, p, v.ext, std::nullopt);
            s.variables.push_back(std::move(v));
        }
    }

    void read_activities(const XmlElement& el, const std::string& path, Scenario& s) {
        ignored_attributes(el, path, {});
        int i = 0;
        for (const auto& child : el.children) {
            if (child.name != "activity") {
                foreign_child(child, path);
                continue;
            }
            const auto p = indexed(path, "activity", ++i);
            ActivitySpec a;
            a.id = required(child, "id", p);
            const auto grain_text = optional_attr(child, "grain").value_or("activity");
            auto grain = parse_grain(grain_text);
            if (!grain) throw ParseError(p, "unknown grain '" + grain_text + "'");
            a.grain = *grain;
            a.expected_duration_s = decimal_attr(child, "duration", p, Decimal{});
            a.ext.attributes = unknown_attributes(child, p, {"id", "grain", "duration"});
            int j = 0;
            for (const auto& effect : child.children) {
                const auto ep = indexed(p, effect.name, ++j);
                if (effect.name == "objective-effect") {
                    const auto objective = required(effect, "objective", ep);
                    const Interval delta{decimal_attr(effect, "min", ep), decimal_attr(effect, "max", ep)};
                    ignored_attributes(effect, ep, {"objective", "min", "max"});
                    if (!a.objective_effects.emplace(objective, delta).second) {
                        throw ParseError(ep, "duplicate effect on objective '" + objective + "'");
                    }
                } else if (effect.name == "variable-effect") {
                    const auto variable = required(effect, "variable", ep);
                    VariableEffect ve;
                    ve.delta = Interval{decimal_attr(effect, "min", ep), decimal_attr(effect, "max", ep)};
                    const auto mode_text = optional_attr(effect, "mode").value_or("add");
                    auto mode = parse_effect_mode(mode_text);
                    if (!mode) throw ParseError(ep, "unknown effect mode '" + mode_text + "'");
                    ve.mode = *mode;
                    ignored_attributes(effect, ep, {"variable", "min", "max", "mode"});
                    if (!a.variable_effects.emplace(variable, ve).second) {
                        throw ParseError(ep, "duplicate effect on variable '" + variable + "'");
                    }
                } else {
                    unknown_element(effect, p, a.ext, std::nullopt);
                }
            }
            const auto id = a.id;
            if (!s.activities.emplace(id, std::move(a)).second) {
                diags_.push_back(make_diagnostic(codes::kInvalidDeclaration, std::nullopt,
                                                 "duplicate activity id '" + id + "' (first kept)"));
            }
        }
    }

    void read_toolbar(const XmlElement& el, const std::string& path, Scenario& s) {
        ignored_attributes(el, path, {});
        int i = 0;
        for (const auto& child : el.children) {
            if (child.name != "tool") {
                foreign_child(child, path);
                continue;
            }
            const auto p = indexed(path, "tool", ++i);
            s.toolbar.push_back(required(child, "id", p));
            ignored_attributes(child, p, {"id"});
        }
    }

    void read_profile(const XmlElement& el, const std::string& path, Scenario& s) {
        for (const auto& word : split_words(optional_attr(el, "indicators").value_or(""))) {
            auto indicator = parse_indicator(word);
            if (!indicator) throw ParseError(path, "unknown indicator '" + word + "'");
            s.learner_profile.indicators.insert(*indicator);
        }
        ignored_attributes(el, path, {"indicators"});
        int i = 0;
        for (const auto& child : el.children) {
            if (child.name != "track") {
                foreign_child(child, path);
                continue;
            }
            const auto p = indexed(path, "track", ++i);
            const auto objective = required(child, "objective", p);
            s.learner_profile.objectives.push_back(objective);
            if (const auto* m = child.attribute("mechanism")) {
                auto mechanism = parse_score_mechanism(*m);
                if (!mechanism) throw ParseError(p, "unknown score mechanism '" + *m + "'");
                s.learner_profile.score_mechanism[objective] = *mechanism;
            }
            ignored_attributes(child, p, {"objective", "mechanism"});
        }
    }

    void read_acts(const XmlElement& el, const std::string& path, Scenario& s) {
        ignored_attributes(el, path, {});
        int i = 0;
        for (const auto& child : el.children) {
            if (child.name != "act") {
                foreign_child(child, path);
                continue;
            }
            const auto p = indexed(path, "act", ++i);
            Act act;
            act.id = required(child, "id", p);
            act.objective_id = required(child, "objective", p);
            act.ext.attributes = unknown_attributes(child, p, {"id", "objective"});
            int j = 0;
            for (const auto& scene_el : child.children) {
                if (scene_el.name != "scene") {
                    unknown_element(scene_el, p, act.ext, std::nullopt);
                    continue;
                }
                act.scenes.push_back(read_scene(scene_el, indexed(p, "scene", ++j)));
            }
            s.acts.push_back(std::move(act));
        }
    }

    Scene read_scene(const XmlElement& el, const std::string& path) {
        Scene scene;
        scene.num = integer_attr(el, "num", path);
        scene.prec = integer_attr(el, "prec", path);
        if (scene.num <= 0) throw ParseError(path, "scene num must be positive");
        scene.asset_path = optional_attr(el, "chemin").value_or("");
        scene.description = optional_attr(el, "description").value_or("");
        scene.activity_id = optional_attr(el, "activity");
        if (const auto* m = el.attribute("moments")) {
            scene.moments.clear();
            for (const auto& word : split_words(*m)) {
                auto moment = parse_moment(word);
                if (!moment) throw ParseError(path, "unknown moment '" + word + "'");
                scene.moments.insert(*moment);
            }
        }
        scene.ext.attributes =
            unknown_attributes(el, path, {"num", "prec", "chemin", "description", "activity", "moments"}, scene.num);
        int k = 0;
        for (const auto& child : el.children) {
            const auto p = indexed(path, child.name, ++k);
            if (child.name == "t") {
                Transition t;
                t.target = integer_attr(child, "to", p);
                if (const auto* cond = child.attribute("cond")) {
                    try {
                        t.guard = parse_condition(*cond);
                    } catch (const ConditionSyntaxError& e) {
                        throw ParseError(p, "condition \"" + *cond + "\": " + e.what());
                    }
                }
                ignored_attributes(child, p, {"to", "cond"}, scene.num);
                scene.transitions.push_back(std::move(t));
            } else if (child.name == "choice") {
                scene.choices.push_back(integer_attr(child, "to", p));
                ignored_attributes(child, p, {"to"}, scene.num);
            } else {
                unknown_element(child, path, scene.ext, scene.num);
            }
        }
        return scene;
    }

    std::vector<Diagnostic> diags_;
};

void append_ext(XmlElement& el, const Extensions& ext) {
    for (const auto& attr : ext.attributes) el.attributes.push_back(attr);
    for (const auto& child : ext.elements) el.children.push_back(child);
}

XmlElement make_element(std::string name, std::vector<std::pair<std::string, std::string>> attributes = {}) {
    XmlElement el;
    el.name = std::move(name);
    el.attributes = std::move(attributes);
    return el;
}

}  // namespace

LegacyParseResult parse_legacy(std::string_view bytes) {
    const auto doc = parse_xml(bytes, XmlReadOptions{.lenient = true});
    if (doc.root.name != "scenes") throw ParseError("/" + doc.root.name, "expected root element <scenes>");

    LegacyParseResult result;
    auto& diags = result.diagnostics;
    for (const auto& r : doc.recoveries) {
        diags.push_back(make_diagnostic(codes::kMarkupRecovered, std::nullopt,
                                        "line " + std::to_string(r.line) + ": " + r.what));
    }
    for (const auto& [k, v] : doc.root.attributes) {
        result.storyboard.ext.attributes.emplace_back(k, v);
        diags.push_back(make_diagnostic(codes::kUnknownMarkup, std::nullopt,
                                        "/scenes: unknown attribute '" + k + "' preserved"));
    }
    int index = 0;
    for (const auto& child : doc.root.children) {
        if (child.name != "scene") {
            result.storyboard.ext.elements.push_back(child);
            diags.push_back(make_diagnostic(codes::kUnknownMarkup, std::nullopt,
                                            "/scenes: unknown element <" + child.name + "> preserved"));
            continue;
        }
        result.storyboard.scenes.push_back(
            read_legacy_scene(child, "/scenes/scene[" + std::to_string(++index) + "]", diags));
    }

    std::vector<SceneNum> starts;
    for (const auto& scene : result.storyboard.scenes) {
        if (scene.prec == 0) starts.push_back(scene.num);
    }
    for (auto& d : start_diagnostics(starts)) diags.push_back(std::move(d));
    sort_diagnostics(diags);
    return result;
}

Scenario to_scenario(const LegacyStoryboard& legacy, const ScenarioDefaults& defaults) {
    std::vector<SceneNum> starts;
    for (const auto& scene : legacy.scenes) {
        if (scene.prec == 0) starts.push_back(scene.num);
    }
    if (auto problems = start_diagnostics(starts); !problems.empty()) throw DiagnosticError(problems.front());

    Scenario s;
    s.id = defaults.id;
    s.title = defaults.title;
    s.objectives.push_back(PedagogicalObjective{defaults.objective_id, defaults.objective_name, defaults.threshold, {}});
    s.principal_objectives.push_back(defaults.objective_id);
    s.variables.push_back(VariableDecl{defaults.score_variable, defaults.score_initial, defaults.score_range, {}});
    s.learner_profile.objectives.push_back(defaults.objective_id);
    s.ext = legacy.ext;

    Act act;
    act.id = defaults.act_id;
    act.objective_id = defaults.objective_id;
    for (const auto& raw : legacy.scenes) {
        Scene scene;
        scene.num = raw.num;
        scene.prec = raw.prec;
        scene.asset_path = raw.chemin;
        scene.description = raw.description;
        for (const auto& t : raw.transitions) scene.transitions.push_back(Transition{t.guard, t.target});
        scene.ext = raw.ext;
        act.scenes.push_back(std::move(scene));
    }
    s.acts.push_back(std::move(act));
    return s;
}

ScenarioParseResult parse_scenario(std::string_view bytes) { return CanonicalReader().read(bytes); }

std::string serialize_scenario(const Scenario& s) {
    XmlElement root = make_element("scenario", {{"schema_version", "1"}, {"id", s.id}});
    if (!s.title.empty()) root.attributes.emplace_back("title", s.title);

    XmlElement objectives = make_element("objectives", {{"principal", join_words(s.principal_objectives)}});
    for (const auto& o : s.objectives) {
        XmlElement el = make_element("objective", {{"id", o.id}});
        if (!o.name.empty()) el.attributes.emplace_back("name", o.name);
        el.attributes.emplace_back("threshold", o.threshold.to_string());
        append_ext(el, o.ext);
        objectives.children.push_back(std::move(el));
    }
    root.children.push_back(std::move(objectives));

    XmlElement variables = make_element("variables");
    for (const auto& v : s.variables) {
        XmlElement el = make_element("variable", {{"name", v.name},
                                                  {"initial", v.initial.to_string()},
                                                  {"lo", v.range.lo.to_string()},
                                                  {"hi", v.range.hi.to_string()}});
        append_ext(el, v.ext);
        variables.children.push_back(std::move(el));
    }
    root.children.push_back(std::move(variables));

    XmlElement activities = make_element("activities");
    for (const auto& [id, a] : s.activities) {
        XmlElement el = make_element("activity", {{"id", a.id},
                                                  {"grain", std::string(to_string(a.grain))},
                                                  {"duration", a.expected_duration_s.to_string()}});
        for (const auto& [objective, delta] : a.objective_effects) {
            el.children.push_back(make_element(
                "objective-effect",
                {{"objective", objective}, {"min", delta.lo.to_string()}, {"max", delta.hi.to_string()}}));
        }
        for (const auto& [variable, effect] : a.variable_effects) {
            el.children.push_back(make_element("variable-effect", {{"variable", variable},
                                                                   {"min", effect.delta.lo.to_string()},
                                                                   {"max", effect.delta.hi.to_string()},
                                                                   {"mode", std::string(to_string(effect.mode))}}));
        }
        append_ext(el, a.ext);
        activities.children.push_back(std::move(el));
    }
    root.children.push_back(std::move(activities));

    XmlElement toolbar = make_element("toolbar");
    for (const auto& tool : s.toolbar) toolbar.children.push_back(make_element("tool", {{"id", tool}}));
    root.children.push_back(std::move(toolbar));

    std::vector<std::string_view> indicator_names;
    for (auto i : s.learner_profile.indicators) indicator_names.push_back(to_string(i));
    XmlElement profile = make_element("learner-profile");
    if (!indicator_names.empty()) profile.attributes.emplace_back("indicators", join_words(indicator_names));
    for (const auto& objective : s.learner_profile.objectives) {
        XmlElement track = make_element("track", {{"objective", objective}});
        if (auto it = s.learner_profile.score_mechanism.find(objective); it != s.learner_profile.score_mechanism.end()) {
            track.attributes.emplace_back("mechanism", std::string(to_string(it->second)));
        }
        profile.children.push_back(std::move(track));
    }
    root.children.push_back(std::move(profile));

    XmlElement acts = make_element("acts");
    for (const auto& act : s.acts) {
        XmlElement act_el = make_element("act", {{"id", act.id}, {"objective", act.objective_id}});
        for (const auto& scene : act.scenes) {
            XmlElement el = make_element("scene", {{"num", std::to_string(scene.num)}, {"prec", std::to_string(scene.prec)}});
            if (!scene.asset_path.empty()) el.attributes.emplace_back("chemin", scene.asset_path);
            if (!scene.description.empty()) el.attributes.emplace_back("description", scene.description);
            if (scene.activity_id) el.attributes.emplace_back("activity", *scene.activity_id);
            std::vector<std::string_view> moment_names;
            for (auto m : scene.moments) moment_names.push_back(to_string(m));
            el.attributes.emplace_back("moments", join_words(moment_names));
            for (const auto& t : scene.transitions) {
                XmlElement t_el = make_element("t");
                if (t.guard) t_el.attributes.emplace_back("cond", print_condition(*t.guard));
                t_el.attributes.emplace_back("to", std::to_string(t.target));
                el.children.push_back(std::move(t_el));
            }
            for (auto target : scene.choices) {
                el.children.push_back(make_element("choice", {{"to", std::to_string(target)}}));
            }
            append_ext(el, scene.ext);
            act_el.children.push_back(std::move(el));
        }
        append_ext(act_el, act.ext);
        acts.children.push_back(std::move(act_el));
    }
    root.children.push_back(std::move(acts));

    append_ext(root, s.ext);
    return write_xml(root);
}

std::string export_legacy(const Scenario& s) {
    if (s.acts.size() != 1) {
        throw NotRepresentable("not representable: the legacy format holds exactly one act (scenario has " +
                               std::to_string(s.acts.size()) + ")");
    }
    XmlElement root = make_element("scenes");
    for (const auto& scene : s.acts.front().scenes) {
        if (!scene.choices.empty()) {
            throw NotRepresentable("not representable: scene " + std::to_string(scene.num) +
                                   " offers player choices, which the legacy format cannot express");
        }
        XmlElement el = make_element("scene", {{"num", std::to_string(scene.num)},
                                               {"prec", std::to_string(scene.prec)},
                                               {"chemin", scene.asset_path},
                                               {"description", scene.description}});
        const auto guards = std::count_if(scene.transitions.begin(), scene.transitions.end(),
                                          [](const Transition& t) { return t.guard.has_value(); });
        int k = 0;
        for (const auto& t : scene.transitions) {
            const auto index = std::to_string(++k);
            if (t.guard) {
                el.attributes.emplace_back(guards == 1 && k == 1 ? "condition" : "condition" + index,
                                           print_condition(*t.guard));
            }
            el.attributes.emplace_back("suiv" + index, std::to_string(t.target));
        }
        append_ext(el, scene.ext);
        root.children.push_back(std::move(el));
    }
    append_ext(root, s.ext);
    return write_xml(root);
}

DocumentKind detect_document_kind(std::string_view bytes) {
    std::size_t pos = 0;
    while (true) {
        pos = bytes.find('<', pos);
        if (pos == std::string_view::npos || pos + 1 >= bytes.size()) return DocumentKind::Unknown;
        const char next = bytes[pos + 1];
        if (bytes.substr(pos, 4) == "<!--") {
            const auto end = bytes.find("-->", pos + 4);
            pos = end == std::string_view::npos ? pos + 4 : end + 3;
            continue;
        }
        if (next == '?' || next == '!') {
            ++pos;
            continue;
        }
        const auto rest = bytes.substr(pos + 1);
        auto is_root = [&](std::string_view name) {
            return rest.substr(0, name.size()) == name &&
                   (rest.size() == name.size() || std::string_view(" \t\r\n/>").find(rest[name.size()]) != std::string_view::npos);
        };
        if (is_root("scenes")) return DocumentKind::Legacy;
        if (is_root("scenario")) return DocumentKind::Canonical;
        return DocumentKind::Unknown;
    }
}

}  // namespace sgforge
