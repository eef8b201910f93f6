#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mmot/cost_graph.hpp"

using namespace mmot;

namespace {
CostEdge edge(int a, int b, double w = 1.0) { return {a, b, PairwiseCost(w)}; }
}  // namespace

TEST_CASE("cost graph validation") {
    REQUIRE_THROWS_AS(CostGraph(4, {edge(0, 1), edge(2, 3)}), DisconnectedGraph);
    REQUIRE_THROWS(CostGraph(3, {edge(0, 1), edge(0, 1), edge(1, 2)}));  // parallel edge
    REQUIRE_THROWS_AS(CostGraph(2, {edge(0, 2)}), Error);  // endpoint out of range
    REQUIRE_THROWS_AS(PairwiseCost(0.0), NonpositiveWeight);
}

TEST_CASE("unrolling a tree is the identity") {
    // chain cost c12 + c23 + c14
    CostGraph g(4, {edge(0, 1), edge(1, 2), edge(0, 3)});
    UnrollResult u = unroll(g);
    REQUIRE(u.tree.node_count() == 4);
    REQUIRE(u.tree.edges().size() == 3);
    for (int i = 0; i < 4; ++i) REQUIRE(u.dup_map[i] == i);
}

TEST_CASE("unrolling the 4-cycle duplicates the third marginal") {
    // c12 + c14 + c23 + c34
    CostGraph g(4, {edge(0, 1), edge(0, 3), edge(1, 2), edge(2, 3)});
    UnrollResult u = unroll(g);
    REQUIRE(u.tree.node_count() == 5);
    REQUIRE(u.tree.is_tree());
    REQUIRE(u.dup_map[4] == 2);  // the duplicate carries marginal 3
    // the rerouted edge connects node 4 (original index 3) to the duplicate
    bool found = false;
    for (const auto& e : u.tree.edges()) found |= (e.a == 3 && e.b == 4);
    REQUIRE(found);
}

TEST_CASE("unrolling K4 adds |E|+1-|V| = 3 duplicates") {
    CostGraph g(4, {edge(0, 1), edge(0, 2), edge(0, 3), edge(1, 2), edge(1, 3), edge(2, 3)});
    UnrollResult u = unroll(g);
    REQUIRE(u.tree.node_count() == 7);
    int dups = 0;
    for (std::size_t j = 0; j < u.dup_map.size(); ++j)
        if (u.dup_map[j] != static_cast<int>(j)) ++dups;
    REQUIRE(dups == 3);
    REQUIRE(u.tree.is_tree());
}

TEST_CASE("root_tree layers match the reference figures") {
    CostGraph g(4, {edge(0, 1), edge(1, 2), edge(0, 3)});
    SECTION("rooted at node 4") {
        RootedTree rt = root_tree(g, 3);
        REQUIRE(rt.layer == std::vector<int>{1, 2, 3, 0});
        REQUIRE(rt.parent[0] == 3);
        REQUIRE(rt.parent[1] == 0);
        REQUIRE(rt.parent[2] == 1);
    }
    SECTION("rooted at node 1") {
        RootedTree rt = root_tree(g, 0);
        REQUIRE(rt.layer == std::vector<int>{0, 1, 2, 1});
    }
    SECTION("star rooted at its center") {
        CostGraph star(4, {edge(0, 1), edge(0, 2), edge(0, 3)});
        RootedTree rt = root_tree(star, 0);
        REQUIRE(rt.layer == std::vector<int>{0, 1, 1, 1});
    }
    SECTION("bad inputs") {
        REQUIRE_THROWS_AS(root_tree(g, 9), InvalidRoot);
        CostGraph cyclic(3, {edge(0, 1), edge(1, 2), edge(0, 2)});
        REQUIRE_THROWS_AS(root_tree(cyclic, 0), NotATree);
    }
}

TEST_CASE("run order goes deepest-first with index tie-breaks, root last") {
    CostGraph g(4, {edge(0, 1), edge(1, 2), edge(0, 3)});
    SECTION("reference tree rooted at node 1") {
        RootedTree rt = root_tree(g, 0);
        REQUIRE(run_order(rt) == std::vector<int>{2, 1, 3, 0});
    }
    SECTION("single edge") {
        CostGraph two(2, {edge(0, 1)});
        RootedTree rt = root_tree(two, 1);
        REQUIRE(run_order(rt) == std::vector<int>{0, 1});
    }
    SECTION("path rooted at an end is strictly descending") {
        CostGraph path(4, {edge(0, 1), edge(1, 2), edge(2, 3)});
        RootedTree rt = root_tree(path, 3);
        REQUIRE(run_order(rt) == std::vector<int>{0, 1, 2, 3});
    }
}

TEST_CASE("layer relation holds on random trees") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_int_distribution<int> msize(2, 10);
        int m = msize(rng);
        std::vector<CostEdge> edges;
        for (int v = 1; v < m; ++v) {
            std::uniform_int_distribution<int> pdist(0, v - 1);
            int p = pdist(rng);
            edges.push_back(edge(std::min(p, v), std::max(p, v)));
        }
        CostGraph g(m, edges);
        std::uniform_int_distribution<int> rdist(0, m - 1);
        RootedTree rt = root_tree(g, rdist(rng));
        for (int i = 0; i < m; ++i) {
            if (i == rt.root) {
                REQUIRE(rt.layer[i] == 0);
                REQUIRE(rt.parent[i] == -1);
            } else {
                REQUIRE(rt.layer[rt.parent[i]] + 1 == rt.layer[i]);
            }
        }
    }
}

TEST_CASE("recover_duals sums duplicate potentials") {
    Grid2D grid(4, 4);
    SECTION("identity when nothing was duplicated") {
        std::vector<PotentialField> tree(3, PotentialField(grid, 1.0));
        tree[1].values[5] = -2.0;
        auto orig = recover_duals(tree, {0, 1, 2}, 3);
        REQUIRE(orig.size() == 3);
        REQUIRE(orig[1].values[5] == -2.0);
    }
    SECTION("duplicates of one node sum pointwise") {
        // six tree nodes where nodes 3 and 5 both carry marginal 4
        std::vector<PotentialField> tree(6, PotentialField(grid));
        tree[3].values[0] = 1.25;
        tree[5].values[0] = 0.5;
        auto orig = recover_duals(tree, {0, 1, 2, 3, 4, 3}, 5);
        REQUIRE(orig[3].values[0] == 1.75);
    }
    SECTION("all-zero tree potentials recover all-zero originals") {
        std::vector<PotentialField> tree(7, PotentialField(grid));
        auto orig = recover_duals(tree, {0, 1, 2, 3, 2, 3, 3}, 4);
        for (const auto& f : orig)
            for (double v : f.values) REQUIRE(v == 0.0);
    }
}
