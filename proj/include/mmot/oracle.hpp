#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mmot/cost_graph.hpp"
#include "mmot/errors.hpp"
#include "mmot/grid.hpp"
#include "mmot/transforms.hpp"

// Exact small-instance verification. The LP is solved by a deliberately
// naive dense two-phase revised simplex written here, so that the oracle
// does not inherit anyone else's bugs; the instance cap keeps it viable.

namespace mmot {

/// A small discrete measure: weighted support points in the plane (set the
/// y coordinates to a constant for 1D instances).
struct DiscreteMarginal {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> w;

    int size() const { return static_cast<int>(w.size()); }
};

struct LpResult {
    double value = 0.0;
    std::vector<double> plan;  // dense over tuples, marginal 0 slowest
    std::vector<int> sizes;
    double feasibility_residual = 0.0;
};

namespace detail {

constexpr long kMaxLpTuples = 200000;

struct TupleIndexer {
    std::vector<int> sizes;
    std::vector<long> strides;
    long total = 1;

    explicit TupleIndexer(std::vector<int> s) : sizes(std::move(s)), strides(sizes.size()) {
        for (int i = static_cast<int>(sizes.size()) - 1; i >= 0; --i) {
            strides[i] = total;
            total *= sizes[i];
        }
    }
    int digit(long j, int i) const { return static_cast<int>((j / strides[i]) % sizes[i]); }
};

}  // namespace detail

/// Exact discrete MMOT as a finite LP: variables P(x_1..x_m) >= 0, one mass
/// constraint per support point per marginal, objective sum c * P with the
/// pairwise cost read off the graph. Throws TooLarge above 2e5 tuples.
inline LpResult lp_mmot(const std::vector<DiscreteMarginal>& marginals, const CostGraph& graph) {
    const int m = static_cast<int>(marginals.size());
    if (graph.node_count() != m) throw Error("graph node count does not match marginal count");
    std::vector<int> sizes(m);
    long total = 1;
    for (int i = 0; i < m; ++i) {
        sizes[i] = marginals[i].size();
        if (sizes[i] <= 0) throw Error("empty marginal");
        total *= sizes[i];
        if (total > detail::kMaxLpTuples) throw TooLarge("instance exceeds the LP tuple cap");
    }
    detail::TupleIndexer idx(sizes);
    const long n_vars = idx.total;

    // cost per tuple
    std::vector<double> cost(n_vars, 0.0);
    for (const auto& e : graph.edges()) {
        const auto& A = marginals[e.a];
        const auto& B = marginals[e.b];
        for (long j = 0; j < n_vars; ++j) {
            int da = idx.digit(j, e.a), db = idx.digit(j, e.b);
            cost[j] += pair_cost(e.cost.weight, A.xs[da], A.ys[da], B.xs[db], B.ys[db]);
        }
    }

    // rows: one per (marginal, support point)
    std::vector<int> row_offset(m);
    int n_rows = 0;
    for (int i = 0; i < m; ++i) {
        row_offset[i] = n_rows;
        n_rows += sizes[i];
    }
    std::vector<double> b(n_rows);
    for (int i = 0; i < m; ++i)
        for (int p = 0; p < sizes[i]; ++p) b[row_offset[i] + p] = marginals[i].w[p];

    auto column_rows = [&](long j, std::vector<int>& rows) {
        rows.resize(m);
        for (int i = 0; i < m; ++i) rows[i] = row_offset[i] + idx.digit(j, i);
    };

    // revised simplex state; artificial variable ids are n_vars + r
    std::vector<double> binv(static_cast<std::size_t>(n_rows) * n_rows, 0.0);
    for (int r = 0; r < n_rows; ++r) binv[static_cast<std::size_t>(r) * n_rows + r] = 1.0;
    std::vector<long> basis(n_rows);
    std::vector<char> is_basic(n_vars, 0);
    for (int r = 0; r < n_rows; ++r) basis[r] = n_vars + r;

    std::vector<double> xb(n_rows), y(n_rows), d(n_rows);
    std::vector<int> rows;
    const double rc_tol = 1e-10;
    const double piv_tol = 1e-11;

    auto compute_xb = [&]() {
        for (int r = 0; r < n_rows; ++r) {
            const double* row = &binv[static_cast<std::size_t>(r) * n_rows];
            double acc = 0.0;
            for (int k = 0; k < n_rows; ++k) acc += row[k] * b[k];
            xb[r] = acc;
        }
    };
    auto compute_y = [&](int phase) {
        std::fill(y.begin(), y.end(), 0.0);
        for (int r = 0; r < n_rows; ++r) {
            double cb = phase == 1 ? (basis[r] >= n_vars ? 1.0 : 0.0) : (basis[r] >= n_vars ? 0.0 : cost[basis[r]]);
            if (cb == 0.0) continue;
            const double* row = &binv[static_cast<std::size_t>(r) * n_rows];
            for (int k = 0; k < n_rows; ++k) y[k] += cb * row[k];
        }
    };
    auto compute_direction = [&](long j) {
        column_rows(j, rows);
        for (int r = 0; r < n_rows; ++r) {
            const double* row = &binv[static_cast<std::size_t>(r) * n_rows];
            double acc = 0.0;
            for (int i = 0; i < m; ++i) acc += row[rows[i]];
            d[r] = acc;
        }
    };
    auto pivot = [&](int r, long j) {
        double p = d[r];
        double* prow = &binv[static_cast<std::size_t>(r) * n_rows];
        for (int k = 0; k < n_rows; ++k) prow[k] /= p;
        for (int rr = 0; rr < n_rows; ++rr) {
            if (rr == r || d[rr] == 0.0) continue;
            double f = d[rr];
            double* row = &binv[static_cast<std::size_t>(rr) * n_rows];
            for (int k = 0; k < n_rows; ++k) row[k] -= f * prow[k];
        }
        if (basis[r] < n_vars) is_basic[basis[r]] = 0;
        basis[r] = j;
        if (j < n_vars) is_basic[j] = 1;
    };
    // Ratio test with Bland tie-breaking. Rows holding a zero-level
    // artificial are eligible to leave for either sign of d, which pins the
    // artificials at zero throughout phase 2.
    auto choose_leaving = [&](double& theta_out) {
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1;
        for (int r = 0; r < n_rows; ++r) {
            double t;
            if (basis[r] >= n_vars) {
                if (std::abs(d[r]) <= piv_tol) continue;
                t = d[r] > 0.0 ? std::max(xb[r], 0.0) / d[r] : 0.0;
            } else {
                if (d[r] <= piv_tol) continue;
                t = std::max(xb[r], 0.0) / d[r];
            }
            if (t < theta - 1e-15 || (t <= theta + 1e-15 && (leave < 0 || basis[r] < basis[leave]))) {
                theta = t;
                leave = r;
            }
        }
        theta_out = theta;
        return leave;
    };

    for (int phase = 1; phase <= 2; ++phase) {
        long guard = 0;
        const long guard_max = 400000;
        while (true) {
            if (++guard > guard_max) throw Error("simplex iteration limit reached");
            compute_xb();
            compute_y(phase);
            long enter = -1;
            for (long j = 0; j < n_vars; ++j) {
                if (is_basic[j]) continue;
                column_rows(j, rows);
                double rc = phase == 1 ? 0.0 : cost[j];
                for (int i = 0; i < m; ++i) rc -= y[rows[i]];
                if (rc < -rc_tol) {
                    enter = j;
                    break;  // Bland: smallest improving index
                }
            }
            if (enter < 0) break;
            compute_direction(enter);
            double theta;
            int leave = choose_leaving(theta);
            if (leave < 0) throw Error("simplex detected an unbounded direction");
            pivot(leave, enter);
        }
        if (phase == 1) {
            compute_xb();
            double infeas = 0.0;
            for (int r = 0; r < n_rows; ++r)
                if (basis[r] >= n_vars) infeas += std::abs(xb[r]);
            if (infeas > 1e-8) throw Error("marginals are inconsistent (phase-1 infeasibility)");
            // drive zero-level artificials out where a real pivot exists
            for (int r = 0; r < n_rows; ++r) {
                if (basis[r] < n_vars) continue;
                for (long j = 0; j < n_vars && basis[r] >= n_vars; ++j) {
                    if (is_basic[j]) continue;
                    compute_direction(j);
                    if (std::abs(d[r]) > 1e-9) pivot(r, j);  // zero-step pivot through row r
                }
            }
        }
    }

    compute_xb();
    LpResult res;
    res.sizes = sizes;
    res.plan.assign(n_vars, 0.0);
    double value = 0.0;
    for (int r = 0; r < n_rows; ++r) {
        if (basis[r] >= n_vars) continue;
        double v = std::max(xb[r], 0.0);
        res.plan[basis[r]] = v;
        value += cost[basis[r]] * v;
    }
    res.value = value;

    double worst = 0.0;
    std::vector<double> sums(n_rows, 0.0);
    for (long j = 0; j < n_vars; ++j) {
        if (res.plan[j] == 0.0) continue;
        for (int i = 0; i < m; ++i) sums[row_offset[i] + idx.digit(j, i)] += res.plan[j];
    }
    for (int r = 0; r < n_rows; ++r) worst = std::max(worst, std::abs(sums[r] - b[r]));
    res.feasibility_residual = worst;
    return res;
}

/// Cost of one grid-cell tuple under the graph's pairwise costs.
inline double tuple_cost(const CostGraph& graph, const Grid2D& grid, const std::vector<int>& cells) {
    double c = 0.0;
    for (const auto& e : graph.edges()) {
        int ca = cells[e.a], cb = cells[e.b];
        c += pair_cost(e.cost.weight, grid.x_center(ca % grid.nx), grid.y_center(ca / grid.nx),
                       grid.x_center(cb % grid.nx), grid.y_center(cb / grid.nx));
    }
    return c;
}

struct CertifyResult {
    double max_violation = 0.0;     // max over tuples of sum f_i - c (<= 0 means feasible)
    double dual_value = 0.0;        // sum_i \int f_i d mu_i
    double gap_to_reference = 0.0;  // reference LP value minus dual value
    long tuples_checked = 0;
    bool exhaustive = false;
};

/// Checks the dual constraint sum_i f_i(x_i) <= c(x_1..x_m) on grid tuples
/// (all of them when the product space is small, a random sample otherwise)
/// and reports the lower-bound gap against a reference primal value.
inline CertifyResult certify_duals(const std::vector<PotentialField>& potentials,
                                   const std::vector<DensityField>& marginals, const CostGraph& graph,
                                   long samples = 10000, unsigned seed = 0,
                                   double reference_value = std::numeric_limits<double>::quiet_NaN()) {
    const int m = graph.node_count();
    if (static_cast<int>(potentials.size()) != m || static_cast<int>(marginals.size()) != m)
        throw Error("certify_duals: size mismatch");
    const Grid2D& grid = potentials.front().grid;
    const long cells = grid.size();

    CertifyResult res;
    for (int i = 0; i < m; ++i) res.dual_value += integrate_against(potentials[i], marginals[i]);
    if (!std::isnan(reference_value)) res.gap_to_reference = reference_value - res.dual_value;

    double pow_total = std::pow(static_cast<double>(cells), m);
    res.exhaustive = pow_total <= 400000.0;
    std::vector<int> tuple(m);
    double worst = -std::numeric_limits<double>::infinity();

    auto violation = [&](const std::vector<int>& t) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += potentials[i].values[t[i]];
        return s - tuple_cost(graph, grid, t);
    };

    if (res.exhaustive) {
        long total = static_cast<long>(pow_total);
        for (long j = 0; j < total; ++j) {
            long rem = j;
            for (int i = m - 1; i >= 0; --i) {
                tuple[i] = static_cast<int>(rem % cells);
                rem /= cells;
            }
            worst = std::max(worst, violation(tuple));
        }
        res.tuples_checked = total;
    } else {
        std::mt19937 rng(seed);
        std::uniform_int_distribution<long> pick(0, cells - 1);
        for (long s = 0; s < samples; ++s) {
            for (int i = 0; i < m; ++i) tuple[i] = static_cast<int>(pick(rng));
            worst = std::max(worst, violation(tuple));
        }
        res.tuples_checked = samples;
    }
    res.max_violation = worst;
    return res;
}

}  // namespace mmot
