#pragma once

#include <algorithm>
#include <numeric>
#include <queue>
#include <vector>

#include "mmot/errors.hpp"
#include "mmot/grid.hpp"

namespace mmot {

/// Pairwise cost c(x,y) = (w/2)|x-y|^2 with w > 0. The scaled quadratic
/// family covers chain costs (w = 1) and Gangbo-Swiech barycenter costs
/// (w = lambda_i * lambda_j); its conjugate gradient is grad h*(p) = p/w.
struct PairwiseCost {
    double weight = 1.0;

    PairwiseCost() = default;
    explicit PairwiseCost(double w) : weight(w) {
        if (!(w > 0.0)) throw NonpositiveWeight();
    }
};

struct CostEdge {
    int a = 0;  // a < b, 0-based node indices
    int b = 0;
    PairwiseCost cost;
};

/// Undirected simple connected graph of marginals (nodes) and pairwise
/// costs (edges). `marginal_of[i]` maps node i to the index of the marginal
/// it carries; it is the identity for user-built graphs and records the
/// duplicate structure for unrolled trees.
class CostGraph {
public:
    CostGraph(int node_count, std::vector<CostEdge> edges)
        : marginal_of_(node_count), edges_(std::move(edges)) {
        std::iota(marginal_of_.begin(), marginal_of_.end(), 0);
        validate();
    }

    CostGraph(std::vector<int> marginal_of, std::vector<CostEdge> edges)
        : marginal_of_(std::move(marginal_of)), edges_(std::move(edges)) {
        validate();
    }

    int node_count() const { return static_cast<int>(marginal_of_.size()); }
    const std::vector<CostEdge>& edges() const { return edges_; }
    int marginal_of(int node) const { return marginal_of_[node]; }
    const std::vector<int>& marginal_map() const { return marginal_of_; }

    bool is_tree() const { return static_cast<int>(edges_.size()) == node_count() - 1; }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(node_count());
        for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
            adj[edges_[e].a].push_back(e);
            adj[edges_[e].b].push_back(e);
        }
        return adj;
    }

private:
    void validate() const {
        int n = node_count();
        if (n < 2) throw Error("cost graph needs at least 2 nodes");
        std::vector<std::pair<int, int>> seen;
        for (const auto& e : edges_) {
            if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n) throw Error("edge endpoint out of range");
            if (e.a == e.b) throw Error("self-loops are not allowed");
            if (e.a > e.b) throw Error("edges must be stored with a < b");
            if (!(e.cost.weight > 0.0)) throw NonpositiveWeight();
            seen.emplace_back(e.a, e.b);
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
            throw Error("parallel edges are not allowed");
        // connectivity
        std::vector<char> visited(n, 0);
        auto adj = adjacency();
        std::queue<int> q;
        q.push(0);
        visited[0] = 1;
        int count = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int e : adj[u]) {
                int v = edges_[e].a == u ? edges_[e].b : edges_[e].a;
                if (!visited[v]) {
                    visited[v] = 1;
                    ++count;
                    q.push(v);
                }
            }
        }
        if (count != n) throw DisconnectedGraph();
    }

    std::vector<int> marginal_of_;
    std::vector<CostEdge> edges_;
};

struct UnrollResult {
    CostGraph tree;
    std::vector<int> dup_map;  // tree node -> original node; identity on the first |V| nodes
};

/// Unrolls a connected graph with cycles into a tree with |E|+1 nodes by
/// duplicating one endpoint of every non-tree edge.
///
/// A BFS spanning tree from node 0 is kept; each remaining edge (i,j) is
/// rerouted to a fresh duplicate of the endpoint with the larger BFS depth
/// (ties: the higher index). Breaking at the deeper endpoint reproduces the
/// standard unroll of a 4-cycle into a path plus one duplicated leaf.
inline UnrollResult unroll(const CostGraph& g) {
    int n = g.node_count();
    const auto& edges = g.edges();

    // Deterministic BFS from node 0 with neighbors in ascending node order.
    std::vector<int> depth(n, -1);
    std::vector<char> edge_in_tree(edges.size(), 0);
    {
        std::vector<std::vector<std::pair<int, int>>> nb(n);  // (neighbor, edge id)
        for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
            nb[edges[e].a].emplace_back(edges[e].b, e);
            nb[edges[e].b].emplace_back(edges[e].a, e);
        }
        for (auto& list : nb) std::sort(list.begin(), list.end());
        std::queue<int> q;
        q.push(0);
        depth[0] = 0;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (auto [v, e] : nb[u]) {
                if (depth[v] < 0) {
                    depth[v] = depth[u] + 1;
                    edge_in_tree[e] = 1;
                    q.push(v);
                }
            }
        }
        for (int i = 0; i < n; ++i)
            if (depth[i] < 0) throw DisconnectedGraph();
    }

    std::vector<int> dup_map(n);
    std::iota(dup_map.begin(), dup_map.end(), 0);
    std::vector<int> marginal_of = g.marginal_map();
    std::vector<CostEdge> tree_edges;
    tree_edges.reserve(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e)
        if (edge_in_tree[e]) tree_edges.push_back(edges[e]);

    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edge_in_tree[e]) continue;
        int i = edges[e].a, j = edges[e].b;
        int dup = depth[i] > depth[j] ? i : (depth[j] > depth[i] ? j : std::max(i, j));
        int keep = dup == i ? j : i;
        int fresh = static_cast<int>(dup_map.size());
        dup_map.push_back(dup);
        marginal_of.push_back(g.marginal_of(dup));
        CostEdge ne;
        ne.a = std::min(keep, fresh);
        ne.b = std::max(keep, fresh);
        ne.cost = edges[e].cost;
        tree_edges.push_back(ne);
    }

    CostGraph tree(std::move(marginal_of), std::move(tree_edges));
    if (!tree.is_tree()) throw Error("internal: unroll did not produce a tree");
    return {std::move(tree), std::move(dup_map)};
}

/// A tree with all edges directed toward the root: every non-root node has
/// exactly one parent, `layer` is the BFS depth from the root, and
/// `edge_weight[i]` is the cost weight on the edge (i, parent(i)).
struct RootedTree {
    int node_count = 0;
    int root = 0;
    std::vector<int> parent;       // -1 for the root
    std::vector<std::vector<int>> children;
    std::vector<int> layer;
    std::vector<double> edge_weight;  // weight of (i, parent(i)); 0 for the root
    std::vector<int> marginal_of;
};

inline RootedTree root_tree(const CostGraph& tree, int root) {
    if (!tree.is_tree()) throw NotATree();
    int n = tree.node_count();
    if (root < 0 || root >= n) throw InvalidRoot(root);

    RootedTree rt;
    rt.node_count = n;
    rt.root = root;
    rt.parent.assign(n, -1);
    rt.children.assign(n, {});
    rt.layer.assign(n, -1);
    rt.edge_weight.assign(n, 0.0);
    rt.marginal_of = tree.marginal_map();

    const auto& edges = tree.edges();
    std::vector<std::vector<std::pair<int, int>>> nb(n);
    for (const auto& e : edges) {
        nb[e.a].emplace_back(e.b, static_cast<int>(&e - edges.data()));
        nb[e.b].emplace_back(e.a, static_cast<int>(&e - edges.data()));
    }
    for (auto& list : nb) std::sort(list.begin(), list.end());

    std::queue<int> q;
    q.push(root);
    rt.layer[root] = 0;
    int count = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (auto [v, e] : nb[u]) {
            if (rt.layer[v] < 0) {
                rt.layer[v] = rt.layer[u] + 1;
                rt.parent[v] = u;
                rt.edge_weight[v] = edges[e].cost.weight;
                rt.children[u].push_back(v);
                q.push(v);
                ++count;
            }
        }
    }
    if (count != n) throw NotATree();
    return rt;
}

/// Processing order for one ascent sweep: deepest layers first, ties broken
/// by ascending node index, root last.
inline std::vector<int> run_order(const RootedTree& rt) {
    std::vector<int> order(rt.node_count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (rt.layer[a] != rt.layer[b]) return rt.layer[a] > rt.layer[b];
        return a < b;
    });
    return order;
}

/// Collapses tree potentials back onto the original marginals: the original
/// dual variable is the pointwise sum of the potentials of all its duplicates.
inline std::vector<PotentialField> recover_duals(const std::vector<PotentialField>& tree_potentials,
                                                 const std::vector<int>& dup_map, int original_count) {
    if (tree_potentials.size() != dup_map.size()) throw Error("dup_map size mismatch");
    std::vector<PotentialField> out;
    out.reserve(original_count);
    for (int i = 0; i < original_count; ++i) out.emplace_back(tree_potentials.front().grid);
    for (std::size_t j = 0; j < tree_potentials.size(); ++j) out[dup_map[j]] += tree_potentials[j];
    return out;
}

}  // namespace mmot
