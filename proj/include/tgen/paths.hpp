#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tgen/model.hpp"

namespace tgen {

struct PathBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownNodeId : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PathBudget {
    size_t max_paths = 10000;
    size_t max_depth = 500;
};

struct AdjacencyEntry {
    std::string neighbor;
    std::optional<std::string> condition;
};

using AdjacencyList = std::map<std::string, std::vector<AdjacencyEntry>>;

// One enumerated node path plus the condition (if any) of each traversed
// edge; transitions[k] guards the step ids[k] -> ids[k+1].
struct NodePath {
    std::vector<std::string> ids;
    std::vector<std::optional<std::string>> transitions;

    bool operator==(const NodePath&) const = default;
};

struct PathSet {
    std::vector<NodePath> node_paths;
    std::vector<TestPath> translated;
};

// Neighbor order follows edge declaration order; parallel edges are
// kept as separate entries.
inline AdjacencyList build_adjacency(const Cfg& cfg) {
    AdjacencyList adj;
    for (const auto& n : cfg.nodes) adj[n.id];
    for (const auto& e : cfg.edges) adj[e.from].push_back({e.to, e.condition});
    return adj;
}

namespace detail {

struct DfsState {
    const AdjacencyList& adj;
    const PathBudget& budget;
    std::vector<NodePath>& out;
};

// On revisiting a node already in the current path, the path is saved
// as-is (the revisited node is not re-appended) and that branch stops.
inline void dfs_paths(DfsState& st, const std::string& curr, NodePath path) {
    if (std::find(path.ids.begin(), path.ids.end(), curr) != path.ids.end()) {
        // cycle entry: drop the condition of the edge leading back in
        path.transitions.resize(path.ids.empty() ? 0 : path.ids.size() - 1);
        st.out.push_back(std::move(path));
        if (st.out.size() > st.budget.max_paths)
            throw PathBudgetExceeded("path count exceeds " + std::to_string(st.budget.max_paths));
        return;
    }
    path.ids.push_back(curr);
    if (path.ids.size() > st.budget.max_depth)
        throw PathBudgetExceeded("path depth exceeds " + std::to_string(st.budget.max_depth));

    const auto& neighbors = st.adj.at(curr);
    if (neighbors.empty()) {
        st.out.push_back(std::move(path));
        if (st.out.size() > st.budget.max_paths)
            throw PathBudgetExceeded("path count exceeds " + std::to_string(st.budget.max_paths));
        return;
    }
    for (const auto& entry : neighbors) {
        NodePath branch = path;
        branch.transitions.push_back(entry.condition);
        dfs_paths(st, entry.neighbor, std::move(branch));
    }
}

}  // namespace detail

// DFS path enumeration from the root, terminating at leaves and cycle
// entry points; deterministic in edge-list order.
inline std::vector<NodePath> enumerate_node_paths(const Cfg& cfg, const PathBudget& budget = {}) {
    if (cfg.nodes.empty()) return {};
    AdjacencyList adj = build_adjacency(cfg);
    std::vector<NodePath> out;
    detail::DfsState st{adj, budget, out};
    detail::dfs_paths(st, cfg.root().id, NodePath{});
    return out;
}

// Replaces node ids with their statements and inserts each traversed
// edge's condition as a "condition: ..." step before the target
// statement.
inline PathSet translate_paths(const Cfg& cfg, std::vector<NodePath> node_paths) {
    std::map<std::string, std::string> statements;
    for (const auto& n : cfg.nodes) statements[n.id] = n.statement;

    PathSet set;
    for (auto& np : node_paths) {
        TestPath tp;
        for (size_t k = 0; k < np.ids.size(); ++k) {
            if (k > 0 && k - 1 < np.transitions.size() && np.transitions[k - 1])
                tp.steps.push_back(condition_step(*np.transitions[k - 1]));
            auto it = statements.find(np.ids[k]);
            if (it == statements.end()) throw UnknownNodeId("unknown node id: " + np.ids[k]);
            tp.steps.push_back(it->second);
        }
        set.translated.push_back(std::move(tp));
        set.node_paths.push_back(std::move(np));
    }
    return set;
}

inline PathSet extract_paths(const Cfg& cfg, const PathBudget& budget = {}) {
    return translate_paths(cfg, enumerate_node_paths(cfg, budget));
}

}  // namespace tgen
