#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mmot/cost_graph.hpp"
#include "mmot/errors.hpp"
#include "mmot/grid.hpp"
#include "mmot/poisson.hpp"
#include "mmot/transforms.hpp"

namespace mmot {

/// Problem data: the pairwise cost graph (before unrolling) and one marginal
/// density per graph node, all on a common grid. The transport plan itself is
/// never formed; the solver works entirely on the dual side.
struct MmotProblem {
    CostGraph graph;
    std::vector<DensityField> marginals;

    MmotProblem(CostGraph g, std::vector<DensityField> mus) : graph(std::move(g)), marginals(std::move(mus)) {
        if (graph.node_count() != static_cast<int>(marginals.size()))
            throw Error("marginal count does not match graph node count");
        for (const auto& mu : marginals)
            if (mu.grid != marginals.front().grid) throw GridMismatch();
    }
};

enum class RootMode { fixed, cycle };

struct SolverConfig {
    double sigma0 = 0.0;  // <= 0 selects 1 / max edge weight
    double armijo_slope = 0.1;
    double shrink = 0.5;
    double grow = 1.1;
    int max_iters = 500;
    double tol_objective = 1e-9;  // relative objective stall
    double tol_residual = 1e-4;   // max marginal L1 residual
    RootMode root_mode = RootMode::cycle;
    int fixed_root = 0;  // tree node index when root_mode == fixed
    int max_backtracks = 20;
    Deposit deposit = Deposit::bilinear;
};

/// Mutable ascent state on the unrolled tree. After every ascent step the
/// root potential equals the sum of its children's net potentials, which
/// keeps the tuple dual-feasible up to the staleness of one sweep.
struct DualState {
    std::vector<PotentialField> potentials;      // f_i per tree node
    std::vector<PotentialField> net_potentials;  // f'_i on edge (i, parent(i))
    std::vector<char> net_ready;
    int iteration = 0;
    std::vector<double> objective_history;
    std::vector<double> residual_history;

    explicit DualState(int node_count, const Grid2D& grid)
        : potentials(node_count, PotentialField(grid)),
          net_potentials(node_count, PotentialField(grid)),
          net_ready(node_count, 0) {}
};

/// Net potential f'_i = (f_i - sum of children's f'_j)^{c_{i,parent}}.
/// Children must have been refreshed first (deepest layers first); the leaf
/// case reduces to the plain c-transform of f_i.
inline const PotentialField& net_potential(int i, DualState& state, const RootedTree& rt) {
    if (i == rt.root) throw Error("root node has no net potential");
    PotentialField g = state.potentials[i];
    for (int j : rt.children[i]) {
        if (!state.net_ready[j]) throw ChildNotReady(i);
        g -= state.net_potentials[j];
    }
    state.net_potentials[i] = c_transform(g, rt.edge_weight[i]);
    state.net_ready[i] = 1;
    return state.net_potentials[i];
}

/// Dual functional I = sum_i \int f_i d mu_i over tree nodes.
inline double dual_objective(const DualState& state, const std::vector<const DensityField*>& mus) {
    double total = 0.0;
    for (std::size_t i = 0; i < state.potentials.size(); ++i)
        total += integrate_against(state.potentials[i], *mus[i]);
    return total;
}

/// Max over non-root nodes of the L1 mismatch between mu_k and the
/// pushforward of the parent marginal under f'_k. Zero exactly at a
/// discrete optimum; recomputes net potentials, leaves potentials alone.
inline double marginal_residual(DualState& state, const std::vector<const DensityField*>& mus,
                                const RootedTree& rt, Deposit deposit = Deposit::bilinear) {
    auto order = run_order(rt);
    std::fill(state.net_ready.begin(), state.net_ready.end(), 0);
    double worst = 0.0;
    for (int k : order) {
        if (k == rt.root) continue;
        const PotentialField& fp = net_potential(k, state, rt);
        DensityField push = pushforward(fp, *mus[rt.parent[k]], rt.edge_weight[k], deposit);
        worst = std::max(worst, l1_distance(*mus[k], push));
    }
    return worst;
}

struct SweepStats {
    double grad_norm_sq = 0.0;  // sum over nodes of \int res * (-Lap)^{-1} res
    double residual_max = 0.0;  // max L1 residual seen during the sweep
};

/// One pass of the rooted-tree ascent: in run order, refresh each non-root
/// net potential, then move f_k along sigma * (-Lap)^{-1}(mu_k - S# mu_parent);
/// finally reassign the root from its children's net potentials.
inline SweepStats ascent_step(const RootedTree& rt, const std::vector<int>& order, DualState& state,
                              const std::vector<const DensityField*>& mus, double sigma, NeumannPoisson& poisson,
                              Deposit deposit = Deposit::bilinear) {
    SweepStats stats;
    const Grid2D& grid = state.potentials.front().grid;
    const double area = grid.cell_area();
    std::fill(state.net_ready.begin(), state.net_ready.end(), 0);
    PotentialField residual(grid);
    for (int k : order) {
        if (k == rt.root) continue;
        const PotentialField& fp = net_potential(k, state, rt);
        DensityField push = pushforward(fp, *mus[rt.parent[k]], rt.edge_weight[k], deposit);
        const DensityField& mu_k = *mus[k];
        double l1 = 0.0;
        for (int i = 0; i < grid.size(); ++i) {
            residual.values[i] = mu_k.values[i] - push.values[i];
            l1 += std::abs(residual.values[i]);
        }
        stats.residual_max = std::max(stats.residual_max, area * l1);
        PotentialField ascent = poisson.solve(residual);
        double h1 = 0.0;
        for (int i = 0; i < grid.size(); ++i) h1 += residual.values[i] * ascent.values[i];
        stats.grad_norm_sq += area * h1;
        double* f = state.potentials[k].values.data();
        const double* u = ascent.values.data();
        for (int i = 0; i < grid.size(); ++i) f[i] += sigma * u[i];
    }
    PotentialField root_value(grid);
    for (int j : rt.children[rt.root]) root_value += state.net_potentials[j];
    state.potentials[rt.root] = std::move(root_value);
    return stats;
}

struct Evaluation {
    double objective = 0.0;
    double residual = 0.0;
};

/// Recomputes all net potentials from the current potentials and reassigns
/// the root. This is the Lemma-4.1 tightening: afterwards the root equals
/// the c-transform of the remaining potentials, so the tuple is exactly
/// dual-feasible and the objective is the true constrained dual value.
/// Optionally measures the marginal residual from the same pass.
inline Evaluation evaluate_and_tighten(const RootedTree& rt, const std::vector<int>& order, DualState& state,
                                       const std::vector<const DensityField*>& mus, Deposit deposit,
                                       bool with_residual) {
    std::fill(state.net_ready.begin(), state.net_ready.end(), 0);
    Evaluation ev;
    for (int k : order) {
        if (k == rt.root) continue;
        const PotentialField& fp = net_potential(k, state, rt);
        if (with_residual) {
            DensityField push = pushforward(fp, *mus[rt.parent[k]], rt.edge_weight[k], deposit);
            ev.residual = std::max(ev.residual, l1_distance(*mus[k], push));
        }
    }
    PotentialField root_value(state.potentials.front().grid);
    for (int j : rt.children[rt.root]) root_value += state.net_potentials[j];
    state.potentials[rt.root] = std::move(root_value);
    ev.objective = dual_objective(state, mus);
    return ev;
}

/// Tightening pass without diagnostics.
inline void tighten_root(const RootedTree& rt, DualState& state, const std::vector<const DensityField*>& mus) {
    evaluate_and_tighten(rt, run_order(rt), state, mus, Deposit::bilinear, false);
}

struct IterationRecord {
    int iter = 0;
    int root = 0;
    double sigma = 0.0;
    double objective = 0.0;
    double residual = 0.0;  // pre-step residual of the state this step moved
    int backtracks = 0;
    double wall_ms = 0.0;
};

struct SolveResult {
    std::vector<PotentialField> tree_potentials;
    std::vector<PotentialField> potentials;  // recovered per original marginal
    std::vector<int> dup_map;
    double objective = 0.0;
    bool converged = false;
    std::string stop_reason;
    int iterations = 0;
    std::vector<IterationRecord> history;
};

/// Full dual ascent: unroll the cost graph, then iterate rooted-tree ascent
/// sweeps with a backtracking Armijo line search. The root is either fixed
/// or cycled through the tree nodes (including duplicates) one per
/// iteration. Stops on small marginal residual, relative objective stall,
/// or the iteration cap; a line-search failure (max_backtracks consecutive
/// rejects) returns the best state reached with converged = false.
inline SolveResult solve(const MmotProblem& problem, const SolverConfig& config) {
    UnrollResult unrolled = unroll(problem.graph);
    const CostGraph& tree = unrolled.tree;
    const int n = tree.node_count();
    const Grid2D& grid = problem.marginals.front().grid;

    std::vector<const DensityField*> mus(n);
    for (int i = 0; i < n; ++i) mus[i] = &problem.marginals[tree.marginal_of(i)];

    double max_w = 0.0;
    for (const auto& e : tree.edges()) max_w = std::max(max_w, e.cost.weight);
    // One adaptive step size per rooting: different roots tolerate very
    // different steps, and a shared value collapses under cycling when one
    // rooting keeps backtracking. Unseen roots warm-start from the last
    // accepted step so only the first rooting pays the calibration cost.
    const double sigma0 = config.sigma0 > 0.0 ? config.sigma0 : 1.0 / max_w;
    std::vector<double> sigma_of(n, -1.0);
    double last_accepted_sigma = sigma0;

    if (config.root_mode == RootMode::fixed && (config.fixed_root < 0 || config.fixed_root >= n))
        throw InvalidRoot(config.fixed_root);

    NeumannPoisson poisson(grid);
    DualState state(n, grid);
    SolveResult result;
    result.dup_map = unrolled.dup_map;

    bool converged = false;
    std::string reason = "max_iters";
    int last_root = config.root_mode == RootMode::fixed ? config.fixed_root : 0;
    double prev_objective = std::numeric_limits<double>::quiet_NaN();
    int stall_streak = 0;
    int failed_roots_streak = 0;

    for (int iter = 0; iter < config.max_iters; ++iter) {
        auto t0 = std::chrono::steady_clock::now();
        int root = config.root_mode == RootMode::cycle ? iter % n : config.fixed_root;
        last_root = root;
        RootedTree rt = root_tree(tree, root);
        auto order = run_order(rt);

        // Re-rooting is itself a free ascent move: replacing the new root by
        // the c-transform of the rest never decreases a feasible tuple.
        Evaluation before = evaluate_and_tighten(rt, order, state, mus, config.deposit, true);
        state.residual_history.push_back(before.residual);
        if (before.residual < config.tol_residual) {
            converged = true;
            reason = "residual";
            break;
        }

        double& sigma = sigma_of[root];
        if (sigma < 0.0) sigma = last_accepted_sigma;
        std::vector<PotentialField> snapshot = state.potentials;
        bool accepted = false;
        int backtracks = 0;
        double objective_after = before.objective;
        for (int attempt = 0; attempt <= config.max_backtracks; ++attempt) {
            if (attempt > 0) {
                state.potentials = snapshot;
                sigma *= config.shrink;
                ++backtracks;
            }
            SweepStats stats = ascent_step(rt, order, state, mus, sigma, poisson, config.deposit);
            objective_after = evaluate_and_tighten(rt, order, state, mus, config.deposit, false).objective;
            if (objective_after - before.objective >= config.armijo_slope * sigma * stats.grad_norm_sq) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            state.potentials = std::move(snapshot);  // best state: accepted steps never decrease I
            // Under cycling, another rooting may still ascend where this one
            // is pinned; the run is only discretization-limited once every
            // root has failed in a row.
            if (++failed_roots_streak >= (config.root_mode == RootMode::cycle ? n : 1)) {
                reason = "line_search_failed";
                break;
            }
            continue;
        }
        failed_roots_streak = 0;

        ++state.iteration;
        last_accepted_sigma = sigma;
        state.objective_history.push_back(objective_after);
        IterationRecord rec;
        rec.iter = state.iteration;
        rec.root = root;
        rec.sigma = sigma;
        rec.objective = objective_after;
        rec.residual = before.residual;
        rec.backtracks = backtracks;
        rec.wall_ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(std::chrono::steady_clock::now() - t0)
                .count();
        result.history.push_back(rec);

        sigma *= config.grow;
        // Stall detection waits out several flat steps: a single tiny gain
        // is common right after the step size collapsed and regrows.
        if (!std::isnan(prev_objective) &&
            std::abs(objective_after - prev_objective) <= config.tol_objective * std::max(1.0, std::abs(objective_after)))
            ++stall_streak;
        else
            stall_streak = 0;
        prev_objective = objective_after;
        if (stall_streak >= 5) {
            converged = true;
            reason = "objective_stall";
            break;
        }
    }

    // Emit an exactly feasible tuple: the root is re-derived from the final
    // potentials so that sum_i f_i <= c holds on every grid tuple.
    RootedTree rt = root_tree(tree, last_root);
    tighten_root(rt, state, mus);

    result.tree_potentials = state.potentials;
    result.potentials = recover_duals(state.potentials, unrolled.dup_map, problem.graph.node_count());
    result.objective = dual_objective(state, mus);
    result.converged = converged;
    result.stop_reason = reason;
    result.iterations = state.iteration;
    return result;
}

/// Writes the per-iteration history in the solver's CSV schema.
inline std::string history_csv(const std::vector<IterationRecord>& history) {
    std::string out = "iter,root,sigma,objective,residual,backtracks,wall_ms\n";
    char line[256];
    for (const auto& r : history) {
        std::snprintf(line, sizeof(line), "%d,%d,%.17g,%.17g,%.17g,%d,%.3f\n", r.iter, r.root, r.sigma, r.objective,
                      r.residual, r.backtracks, r.wall_ms);
        out += line;
    }
    return out;
}

}  // namespace mmot
