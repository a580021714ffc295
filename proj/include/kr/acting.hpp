#pragma once

// Callback-driven traversal of an acting ontology.
//
// Traversal starts at the root. While the current class names a callback, the
// callback is invoked and its token selects the unique child whose trigger set
// contains it. A selected class without a callback but with children keeps
// routing the same token one level further down (multi-level skip).

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kr/error.hpp"
#include "kr/ontology.hpp"

namespace kr {

struct CallbackResult {
    std::string token;
    std::optional<std::string> qualifier;
    std::map<std::string, std::string> diagnostics;
};

template <class Input>
struct CallbackSpec {
    std::function<CallbackResult(const Input&)> fn;
    /// Reasoning behind the callback, shown next to class annotations.
    std::string documentation;
    /// Tokens the callback can emit; empty means undeclared.
    std::set<std::string> token_domain;
};

/// Name -> callback table. Ontology documents refer to callbacks by name only.
template <class Input>
class CallbackRegistry {
public:
    CallbackRegistry& add(std::string name, CallbackSpec<Input> spec) {
        callbacks_[std::move(name)] = std::move(spec);
        return *this;
    }

    CallbackRegistry& add(std::string name, std::function<CallbackResult(const Input&)> fn,
                          std::string documentation = {}, std::set<std::string> domain = {}) {
        return add(std::move(name), CallbackSpec<Input>{std::move(fn), std::move(documentation), std::move(domain)});
    }

    const CallbackSpec<Input>* find(const std::string& name) const {
        auto it = callbacks_.find(name);
        return it == callbacks_.end() ? nullptr : &it->second;
    }

    bool contains(const std::string& name) const { return callbacks_.count(name) != 0; }
    std::size_t size() const { return callbacks_.size(); }

private:
    std::map<std::string, CallbackSpec<Input>> callbacks_;
};

struct ClassificationResult {
    /// Root first; consecutive entries are parent -> child.
    std::vector<std::string> path;
    /// tokens[i] is the callback token that selected path[i + 1].
    std::vector<std::string> tokens;
    std::string final_class;
    std::optional<std::string> qualifier;
    bool complete = false;
    std::map<std::string, std::string> diagnostics;

    bool operator==(const ClassificationResult&) const = default;
};

/// A callback threw. Carries the path reached before the failure.
class ClassificationError : public Error {
public:
    ClassificationError(const std::string& message, std::vector<std::string> partial_path)
        : Error(message), partial_path_(std::move(partial_path)) {}

    const std::vector<std::string>& partial_path() const noexcept { return partial_path_; }

private:
    std::vector<std::string> partial_path_;
};

template <class Input>
ClassificationResult classify(const Ontology& ontology, const CallbackRegistry<Input>& registry, const Input& input) {
    ClassificationResult result;
    const OntologyClass* current = &ontology.root();
    result.path.push_back(current->id);
    std::optional<std::string> last_qualifier;

    auto stall = [&] {
        result.final_class = current->id;
        result.complete = false;
        return result;
    };

    while (current->callback) {
        const auto* spec = registry.find(*current->callback);
        if (spec == nullptr)
            throw ClassificationError("callback '" + *current->callback + "' is not registered", result.path);

        CallbackResult r;
        try {
            r = spec->fn(input);
        } catch (const std::exception& e) {
            throw ClassificationError("callback '" + *current->callback + "' failed: " + e.what(), result.path);
        }
        if (r.token.empty())
            throw ClassificationError("callback '" + *current->callback + "' returned an empty token", result.path);
        for (auto& [key, value] : r.diagnostics) result.diagnostics[key] = value;
        result.diagnostics["token." + *current->callback] = r.token;
        last_qualifier = r.qualifier;

        const OntologyClass* next = ontology.route(current->id, r.token);
        if (next == nullptr) return stall();
        current = next;
        result.path.push_back(current->id);
        result.tokens.push_back(r.token);

        while (!current->callback && !ontology.is_leaf(current->id)) {
            next = ontology.route(current->id, r.token);
            if (next == nullptr) return stall();
            current = next;
            result.path.push_back(current->id);
            result.tokens.push_back(r.token);
        }
    }

    result.final_class = current->id;
    result.complete = ontology.is_leaf(current->id);
    if (last_qualifier && !current->qualifiers.empty()) {
        if (current->qualifiers.count(*last_qualifier))
            result.qualifier = last_qualifier;
        else
            result.complete = false;
    }
    return result;
}

enum class FindingKind { MissingCallback, UnreachableTrigger };

struct Finding {
    FindingKind kind;
    std::string class_id;
    std::string detail;

    bool operator==(const Finding&) const = default;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool clean() const { return findings.empty(); }
    std::size_t count(FindingKind kind) const {
        std::size_t n = 0;
        for (const auto& f : findings) n += f.kind == kind;
        return n;
    }
};

/// Cross-checks an ontology against a registry. Never throws for findings.
template <class Input>
ValidationReport validate(const Ontology& ontology, const CallbackRegistry<Input>& registry) {
    ValidationReport report;
    for (const auto& c : ontology.classes()) {
        if (c.callback && !registry.contains(*c.callback))
            report.findings.push_back({FindingKind::MissingCallback, c.id, *c.callback});
    }

    // Check each class's triggers against the nearest ancestor callback, which
    // is the one whose token routes into it (directly or through skips).
    for (const auto& c : ontology.classes()) {
        if (!c.parent) continue;
        const OntologyClass* router = &ontology.at(*c.parent);
        while (!router->callback && router->parent) router = &ontology.at(*router->parent);
        if (!router->callback) continue;
        const auto* spec = registry.find(*router->callback);
        if (spec == nullptr || spec->token_domain.empty()) continue;
        for (const auto& t : c.triggers) {
            if (!spec->token_domain.count(t))
                report.findings.push_back(
                    {FindingKind::UnreachableTrigger, c.id, "'" + t + "' is not produced by " + *router->callback});
        }
    }
    return report;
}

/// Class annotation followed by the documentation of its registered callback.
template <class Input>
std::string class_documentation(const Ontology& ontology, std::string_view class_id,
                                const CallbackRegistry<Input>& registry) {
    const auto& c = ontology.at(class_id);
    std::string text = c.annotations;
    if (c.callback) {
        if (const auto* spec = registry.find(*c.callback); spec && !spec->documentation.empty()) {
            if (!text.empty()) text += "\n\n";
            text += spec->documentation;
        }
    }
    return text;
}

inline std::string class_documentation(const Ontology& ontology, std::string_view class_id) {
    return ontology.at(class_id).annotations;
}

}  // namespace kr
