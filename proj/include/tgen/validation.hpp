#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tgen/model.hpp"

namespace tgen {

enum class ValidationRule {
    EmptyNodeList,
    IsolatedNode,
    UnreachableSecondaryRoot,
    OrphanedReference,
};

inline const char* to_string(ValidationRule r) {
    switch (r) {
        case ValidationRule::EmptyNodeList: return "EmptyNodeList";
        case ValidationRule::IsolatedNode: return "IsolatedNode";
        case ValidationRule::UnreachableSecondaryRoot: return "UnreachableSecondaryRoot";
        case ValidationRule::OrphanedReference: return "OrphanedReference";
    }
    return "?";
}

struct ValidationFailure {
    ValidationRule rule;
    std::string subject;  // node id, or edge index rendered as text
    std::string detail;

    bool operator==(const ValidationFailure&) const = default;
};

struct ValidationVerdict {
    bool valid = true;
    std::vector<ValidationFailure> failures;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["valid"] = valid;
        j["failures"] = nlohmann::json::array();
        for (const auto& f : failures)
            j["failures"].push_back(
                {{"rule", to_string(f.rule)}, {"subject", f.subject}, {"detail", f.detail}});
        return j;
    }
};

struct ValidationOptions {
    // Off by default: the literal rule checks in-degree only, not
    // reachability from the root.
    bool require_root_reachability = false;
};

// Structural validity: empty node list, orphaned edge references,
// isolated nodes, unreachable secondary roots. All failures are
// reported, in that rule order.
inline ValidationVerdict validate_cfg(const Cfg& cfg, const ValidationOptions& opts = {}) {
    ValidationVerdict v;
    auto fail = [&](ValidationRule rule, std::string subject, std::string detail) {
        v.failures.push_back({rule, std::move(subject), std::move(detail)});
    };

    if (cfg.nodes.empty()) {
        fail(ValidationRule::EmptyNodeList, "", "node list is empty");
        v.valid = false;
        return v;
    }

    std::set<std::string> ids;
    for (const auto& n : cfg.nodes) ids.insert(n.id);

    for (size_t i = 0; i < cfg.edges.size(); ++i) {
        const auto& e = cfg.edges[i];
        if (!ids.count(e.from))
            fail(ValidationRule::OrphanedReference, "edge " + std::to_string(i),
                 "\"from\" references unknown node " + e.from);
        if (!ids.count(e.to))
            fail(ValidationRule::OrphanedReference, "edge " + std::to_string(i),
                 "\"to\" references unknown node " + e.to);
    }

    std::set<std::string> in_edges, out_edges, has_incoming;
    for (const auto& e : cfg.edges) {
        if (ids.count(e.from)) out_edges.insert(e.from);
        if (ids.count(e.to)) {
            in_edges.insert(e.to);
            has_incoming.insert(e.to);
        }
    }

    // A single-node graph has no edges to appear in; it is valid.
    if (cfg.nodes.size() > 1) {
        for (const auto& n : cfg.nodes)
            if (!in_edges.count(n.id) && !out_edges.count(n.id))
                fail(ValidationRule::IsolatedNode, n.id, "node appears in no edge");
    }

    const std::string& root = cfg.nodes.front().id;
    for (const auto& n : cfg.nodes) {
        if (n.id == root) continue;
        bool isolated = !in_edges.count(n.id) && !out_edges.count(n.id);
        if (!has_incoming.count(n.id) && !isolated)
            fail(ValidationRule::UnreachableSecondaryRoot, n.id, "non-root node has no incoming edge");
    }

    if (opts.require_root_reachability) {
        std::set<std::string> reached{root};
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& e : cfg.edges)
                if (reached.count(e.from) && ids.count(e.to) && reached.insert(e.to).second)
                    grew = true;
        }
        for (const auto& n : cfg.nodes)
            if (!reached.count(n.id))
                fail(ValidationRule::UnreachableSecondaryRoot, n.id,
                     "node is not reachable from the root");
    }

    v.valid = v.failures.empty();
    return v;
}

}  // namespace tgen
