#pragma once

// Acting ontology data model: a class tree whose edges are selected by
// callback result tokens. Parsing validates every structural invariant, so a
// constructed Ontology is always a well-formed tree.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "kr/error.hpp"

namespace kr {

enum class GuidanceKind { HighlightPeriod, PrescribeSettings };

inline std::string_view to_string(GuidanceKind kind) {
    switch (kind) {
        case GuidanceKind::HighlightPeriod: return "highlight_period";
        case GuidanceKind::PrescribeSettings: return "prescribe_settings";
    }
    return "";
}

inline std::optional<GuidanceKind> parse_guidance_kind(std::string_view text) {
    if (text == "highlight_period") return GuidanceKind::HighlightPeriod;
    if (text == "prescribe_settings") return GuidanceKind::PrescribeSettings;
    return std::nullopt;
}

struct GuidanceAction {
    GuidanceKind kind = GuidanceKind::HighlightPeriod;
    std::map<std::string, std::string> params;

    bool operator==(const GuidanceAction&) const = default;
};

struct OntologyClass {
    std::string id;
    std::string name;
    std::optional<std::string> parent;
    std::set<std::string> triggers;
    std::set<std::string> qualifiers;
    std::optional<std::string> callback;
    std::string annotations;
    std::vector<GuidanceAction> guidance;

    bool is_root() const { return !parent.has_value(); }
    bool operator==(const OntologyClass&) const = default;
};

/// Immutable, validated class tree. Safe to share across threads.
class Ontology {
public:
    /// Validates `classes` and builds the tree. Throws OntologyError.
    Ontology(std::string name, std::vector<OntologyClass> classes)
        : name_(std::move(name)), classes_(std::move(classes)) {
        build();
    }

    const std::string& name() const { return name_; }
    const std::vector<OntologyClass>& classes() const { return classes_; }
    std::size_t size() const { return classes_.size(); }

    const OntologyClass& root() const { return classes_[root_]; }

    bool contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }

    const OntologyClass& at(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) throw NotFound("unknown class id '" + std::string(id) + "'");
        return classes_[it->second];
    }

    /// Lookup by display name (first match in document order).
    const OntologyClass* find_by_name(std::string_view name) const {
        for (const auto& c : classes_)
            if (c.name == name) return &c;
        return nullptr;
    }

    /// Children in document order.
    std::vector<const OntologyClass*> children(std::string_view id) const {
        std::vector<const OntologyClass*> out;
        for (std::size_t i : children_.at(index_of(id))) out.push_back(&classes_[i]);
        return out;
    }

    bool is_leaf(std::string_view id) const { return children_.at(index_of(id)).empty(); }

    /// Child of `id` whose trigger set contains `token`, or nullptr.
    const OntologyClass* route(std::string_view id, std::string_view token) const {
        for (std::size_t i : children_.at(index_of(id))) {
            const auto& child = classes_[i];
            if (child.triggers.count(std::string(token))) return &child;
        }
        return nullptr;
    }

    /// Root-to-parent chain; empty for the root.
    std::vector<std::string> ancestors(std::string_view id) const {
        std::vector<std::string> chain;
        const OntologyClass* cur = &at(id);
        while (cur->parent) {
            cur = &at(*cur->parent);
            chain.push_back(cur->id);
        }
        std::reverse(chain.begin(), chain.end());
        return chain;
    }

    /// True when `id` equals `ancestor` or lies in its subtree.
    bool is_same_or_descendant(std::string_view id, std::string_view ancestor) const {
        const OntologyClass* cur = &at(id);
        for (;;) {
            if (cur->id == ancestor) return true;
            if (!cur->parent) return false;
            cur = &at(*cur->parent);
        }
    }

    bool operator==(const Ontology& other) const {
        return name_ == other.name_ && classes_ == other.classes_;
    }

private:
    std::size_t index_of(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) throw NotFound("unknown class id '" + std::string(id) + "'");
        return it->second;
    }

    void build() {
        if (classes_.empty()) throw OntologyError("ontology has no classes");
        for (std::size_t i = 0; i < classes_.size(); ++i) {
            const auto& c = classes_[i];
            if (c.id.empty()) throw OntologyError("class with empty id");
            if (!index_.emplace(c.id, i).second)
                throw OntologyError("duplicate class id '" + c.id + "'");
        }
        children_.assign(classes_.size(), {});
        std::optional<std::size_t> root;
        for (std::size_t i = 0; i < classes_.size(); ++i) {
            const auto& c = classes_[i];
            if (!c.parent) {
                if (root)
                    throw OntologyError("multiple roots: '" + classes_[*root].id + "' and '" + c.id + "'");
                root = i;
                continue;
            }
            auto it = index_.find(*c.parent);
            if (it == index_.end())
                throw OntologyError("class '" + c.id + "' has unknown parent '" + *c.parent + "'");
            children_[it->second].push_back(i);
        }
        if (!root) throw OntologyError("no root class (every class has a parent)");
        root_ = *root;

        // Every class must reach the root; anything else sits on a cycle.
        for (const auto& c : classes_) {
            const OntologyClass* cur = &c;
            std::size_t steps = 0;
            while (cur->parent) {
                cur = &classes_[index_.at(*cur->parent)];
                if (++steps > classes_.size())
                    throw OntologyError("cycle through class '" + c.id + "'");
            }
        }

        const auto& r = classes_[root_];
        if (!r.triggers.empty()) throw OntologyError("root class '" + r.id + "' must not have triggers");

        for (std::size_t i = 0; i < classes_.size(); ++i) {
            const auto& c = classes_[i];
            if (c.callback && c.callback->empty())
                throw OntologyError("class '" + c.id + "' has an empty callback name");
            if (c.callback && children_[i].empty())
                throw OntologyError("leaf class '" + c.id + "' must not have a callback");
            for (const auto& g : c.guidance)
                for (const auto& [key, value] : g.params)
                    if (key.empty()) throw OntologyError("class '" + c.id + "' has a guidance param with empty key");

            std::set<std::string> seen;
            for (std::size_t child : children_[i]) {
                for (const auto& t : classes_[child].triggers) {
                    if (!seen.insert(t).second)
                        throw OntologyError("sibling trigger collision on '" + t + "' under '" + c.id + "'");
                }
            }
        }
    }

    std::string name_;
    std::vector<OntologyClass> classes_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> children_;
    std::size_t root_ = 0;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw OntologyError("unknown field '" + key + "' in " + where);
    }
}

template <class T>
T require(const nlohmann::json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw OntologyError("missing field '" + std::string(key) + "' in " + where);
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw OntologyError("field '" + std::string(key) + "' has the wrong type in " + where);
    }
}

inline std::set<std::string> string_set(const nlohmann::json& obj, const char* key, const std::string& where) {
    std::set<std::string> out;
    auto it = obj.find(key);
    if (it == obj.end()) return out;
    if (!it->is_array()) throw OntologyError("field '" + std::string(key) + "' must be an array in " + where);
    for (const auto& v : *it) {
        if (!v.is_string()) throw OntologyError("field '" + std::string(key) + "' must hold strings in " + where);
        out.insert(v.get<std::string>());
    }
    return out;
}

}  // namespace detail

inline Ontology ontology_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw OntologyError("ontology document must be a JSON object");
    detail::reject_unknown_keys(doc, {"name", "classes"}, "ontology");
    auto name = detail::require<std::string>(doc, "name", "ontology");
    auto it = doc.find("classes");
    if (it == doc.end() || !it->is_array()) throw OntologyError("ontology needs a 'classes' array");

    std::vector<OntologyClass> classes;
    for (const auto& jc : *it) {
        if (!jc.is_object()) throw OntologyError("class entries must be objects");
        OntologyClass c;
        c.id = detail::require<std::string>(jc, "id", "class");
        const std::string where = "class '" + c.id + "'";
        detail::reject_unknown_keys(jc,
                                    {"id", "name", "parent", "triggers", "qualifiers", "callback", "annotations",
                                     "guidance"},
                                    where);
        c.name = jc.contains("name") ? detail::require<std::string>(jc, "name", where) : c.id;
        if (auto p = jc.find("parent"); p != jc.end() && !p->is_null()) {
            if (!p->is_string()) throw OntologyError("field 'parent' must be a string or null in " + where);
            c.parent = p->get<std::string>();
        }
        c.triggers = detail::string_set(jc, "triggers", where);
        c.qualifiers = detail::string_set(jc, "qualifiers", where);
        if (auto cb = jc.find("callback"); cb != jc.end() && !cb->is_null()) {
            if (!cb->is_string()) throw OntologyError("field 'callback' must be a string or null in " + where);
            c.callback = cb->get<std::string>();
        }
        if (jc.contains("annotations")) c.annotations = detail::require<std::string>(jc, "annotations", where);
        if (auto g = jc.find("guidance"); g != jc.end()) {
            if (!g->is_array()) throw OntologyError("field 'guidance' must be an array in " + where);
            for (const auto& jg : *g) {
                if (!jg.is_object()) throw OntologyError("guidance entries must be objects in " + where);
                detail::reject_unknown_keys(jg, {"kind", "params"}, "guidance of " + where);
                auto kind_text = detail::require<std::string>(jg, "kind", where);
                auto kind = parse_guidance_kind(kind_text);
                if (!kind) throw OntologyError("unknown guidance kind '" + kind_text + "' in " + where);
                GuidanceAction action{*kind, {}};
                if (auto params = jg.find("params"); params != jg.end()) {
                    if (!params->is_object()) throw OntologyError("guidance params must be an object in " + where);
                    for (const auto& [k, v] : params->items()) {
                        if (!v.is_string()) throw OntologyError("guidance param values must be strings in " + where);
                        action.params[k] = v.get<std::string>();
                    }
                }
                c.guidance.push_back(std::move(action));
            }
        }
        classes.push_back(std::move(c));
    }
    return Ontology(std::move(name), std::move(classes));
}

/// Parses an ontology document. Throws OntologyError on malformed or invalid input.
inline Ontology parse_ontology(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw OntologyError(std::string("ontology is not valid JSON: ") + e.what());
    }
    return ontology_from_json(doc);
}

inline nlohmann::json to_json(const Ontology& ontology) {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& c : ontology.classes()) {
        nlohmann::json guidance = nlohmann::json::array();
        for (const auto& g : c.guidance)
            guidance.push_back({{"kind", to_string(g.kind)}, {"params", g.params}});
        classes.push_back({
            {"id", c.id},
            {"name", c.name},
            {"parent", c.parent ? nlohmann::json(*c.parent) : nlohmann::json(nullptr)},
            {"triggers", c.triggers},
            {"qualifiers", c.qualifiers},
            {"callback", c.callback ? nlohmann::json(*c.callback) : nlohmann::json(nullptr)},
            {"annotations", c.annotations},
            {"guidance", guidance},
        });
    }
    return {{"name", ontology.name()}, {"classes", classes}};
}

inline std::string serialize(const Ontology& ontology) { return to_json(ontology).dump(2); }

}  // namespace kr
