#include "birk/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <string>
#include <tuple>

namespace birk {

namespace {

struct Adjacency {
    // incident[node] = (neighbor, branch) pairs sorted by neighbor then branch
    std::vector<std::vector<std::pair<int, std::size_t>>> incident;
};

Adjacency adjacency(const NetlistDoc& doc) {
    Adjacency adj;
    adj.incident.resize(static_cast<std::size_t>(doc.node_count) + 1);
    for (std::size_t i = 0; i < doc.branches.size(); ++i) {
        const auto& br = doc.branches[i];
        adj.incident[br.from_node].emplace_back(br.to_node, i);
        adj.incident[br.to_node].emplace_back(br.from_node, i);
    }
    for (auto& list : adj.incident) std::sort(list.begin(), list.end());
    return adj;
}

void check_connected(const NetlistDoc& doc, const Adjacency& adj) {
    for (int v = 1; v <= doc.node_count; ++v)
        if (adj.incident[v].empty()) throw GraphError("isolated node " + std::to_string(v));
    std::vector<bool> seen(adj.incident.size(), false);
    std::deque<int> queue{1};
    seen[1] = true;
    int count = 1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (auto [w, e] : adj.incident[v]) {
            (void)e;
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                queue.push_back(w);
            }
        }
    }
    if (count != doc.node_count) throw GraphError("graph is not connected");
}

struct Tree {
    std::vector<int> parent;                 // parent node, 0 for the root
    std::vector<std::size_t> parent_branch;  // branch to the parent
    std::vector<int> depth;
    std::vector<bool> in_tree;               // per branch
};

Tree bfs_tree(const NetlistDoc& doc, const Adjacency& adj) {
    std::size_t nodes = adj.incident.size();
    Tree t{std::vector<int>(nodes, 0), std::vector<std::size_t>(nodes, 0), std::vector<int>(nodes, -1),
           std::vector<bool>(doc.branches.size(), false)};
    std::deque<int> queue{1};
    t.depth[1] = 0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (auto [w, e] : adj.incident[v]) {
            if (t.depth[w] >= 0) continue;
            t.depth[w] = t.depth[v] + 1;
            t.parent[w] = v;
            t.parent_branch[w] = e;
            t.in_tree[e] = true;
            queue.push_back(w);
        }
    }
    return t;
}

}  // namespace

IntMatrix build_incidence(const NetlistDoc& doc) {
    auto adj = adjacency(doc);
    check_connected(doc, adj);
    IntMatrix incidence(doc.branches.size(), static_cast<std::size_t>(doc.node_count - 1));
    auto column = [&](int node) -> std::ptrdiff_t {
        if (node == doc.reference_node) return -1;
        return node < doc.reference_node ? node - 1 : node - 2;
    };
    for (std::size_t i = 0; i < doc.branches.size(); ++i) {
        const auto& br = doc.branches[i];
        if (auto c = column(br.from_node); c >= 0) incidence(i, c) = 1;
        if (auto c = column(br.to_node); c >= 0) incidence(i, c) = -1;
    }
    return incidence;
}

IntMatrix build_loop_matrix(const NetlistDoc& doc) {
    auto adj = adjacency(doc);
    check_connected(doc, adj);
    Tree t = bfs_tree(doc, adj);

    std::vector<std::size_t> cotree;
    for (std::size_t i = 0; i < doc.branches.size(); ++i)
        if (!t.in_tree[i]) cotree.push_back(i);

    IntMatrix loops(doc.branches.size(), cotree.size());
    for (std::size_t col = 0; col < cotree.size(); ++col) {
        const auto& chord = doc.branches[cotree[col]];
        loops(cotree[col], col) = 1;
        // Walk the tree path from the chord's head back to its tail.
        int a = chord.to_node;
        int b = chord.from_node;
        while (a != b) {
            if (t.depth[a] >= t.depth[b]) {
                // traverse a -> parent(a)
                std::size_t e = t.parent_branch[a];
                loops(e, col) = doc.branches[e].from_node == a ? 1 : -1;
                a = t.parent[a];
            } else {
                // traverse parent(b) -> b, i.e. the far end of the path
                std::size_t e = t.parent_branch[b];
                loops(e, col) = doc.branches[e].to_node == b ? 1 : -1;
                b = t.parent[b];
            }
        }
    }
    return loops;
}

CircuitGraph build_graph(const NetlistDoc& doc) {
    CircuitGraph g;
    g.incidence = build_incidence(doc);
    g.loop_matrix = build_loop_matrix(doc);
    g.branch_count = doc.branches.size();
    g.independent_nodes = g.incidence.cols();
    g.loop_count = g.loop_matrix.cols();
    if (g.loop_count == 0) throw GraphError("network has no loop");
    for (int v = 1; v <= doc.node_count; ++v)
        if (v != doc.reference_node) g.node_of_column.push_back(v);

    auto adj = adjacency(doc);
    Tree t = bfs_tree(doc, adj);
    for (std::size_t i = 0; i < g.branch_count; ++i)
        if (t.in_tree[i]) g.spanning_tree.push_back(i);
    return g;
}

bool check_tellegen(const IntMatrix& incidence, const IntMatrix& loops) {
    if (loops.rows() != incidence.rows()) return false;
    if (!(loops.transpose() * incidence).is_zero()) return false;
    return rank(incidence) + rank(loops) == incidence.rows();
}

}  // namespace birk
