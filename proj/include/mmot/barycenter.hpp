#pragma once

#include <cmath>
#include <vector>

#include "mmot/cost_graph.hpp"
#include "mmot/errors.hpp"
#include "mmot/grid.hpp"
#include "mmot/solver.hpp"
#include "mmot/transforms.hpp"

namespace mmot {

/// Wasserstein barycenter instance: m >= 2 marginals with positive weights
/// summing to one. Solved as an MMOT under the Gangbo-Swiech cost, whose
/// graph is the complete graph with edge weights lambda_i * lambda_j.
struct BarycenterProblem {
    std::vector<DensityField> marginals;
    std::vector<double> weights;

    BarycenterProblem(std::vector<DensityField> mus, std::vector<double> lambdas)
        : marginals(std::move(mus)), weights(std::move(lambdas)) {
        if (marginals.size() < 2) throw BadWeights("barycenter needs at least 2 marginals");
        if (marginals.size() != weights.size()) throw BadWeights("weight count does not match marginal count");
        double total = 0.0;
        for (double l : weights) {
            if (!(l > 0.0)) throw BadWeights("weights must be positive");
            total += l;
        }
        if (std::abs(total - 1.0) > 1e-12) throw BadWeights("weights must sum to 1");
        for (const auto& mu : marginals)
            if (mu.grid != marginals.front().grid) throw GridMismatch();
    }
};

/// Complete cost graph for the Gangbo-Swiech cost
/// sum_{i<j} (lambda_i lambda_j / 2) |x_i - x_j|^2.
inline CostGraph gs_cost_graph(const std::vector<double>& weights) {
    int m = static_cast<int>(weights.size());
    if (m < 2) throw BadWeights("need at least 2 weights");
    for (double l : weights)
        if (!(l > 0.0)) throw BadWeights("weights must be positive");
    std::vector<CostEdge> edges;
    edges.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) edges.push_back({i, j, PairwiseCost(weights[i] * weights[j])});
    return CostGraph(m, std::move(edges));
}

/// Extracts the barycenter from the recovered dual variable of node i:
/// mu = (id - grad f_i / lambda_i) # mu_i, realized by the pushforward with
/// effective weight lambda_i.
inline DensityField extract_barycenter(const PotentialField& f_i, const DensityField& mu_i, double lambda_i) {
    if (!(lambda_i > 0.0)) throw BadWeights("weight must be positive");
    return pushforward(f_i, mu_i, lambda_i);
}

struct BarycenterResult {
    DensityField barycenter;
    SolveResult solve;         // empty history when the problem short-circuits
    bool degenerate = false;   // true when a single positive weight remained
};

/// Solves the barycenter problem and extracts the density from the first
/// marginal's recovered potential. Extraction from any node agrees at the
/// optimum; averaging across nodes would only blur the result.
inline BarycenterResult solve_barycenter(const BarycenterProblem& problem, const SolverConfig& config) {
    MmotProblem mmot(gs_cost_graph(problem.weights), problem.marginals);
    BarycenterResult out;
    out.solve = solve(mmot, config);
    out.barycenter = extract_barycenter(out.solve.potentials[0], problem.marginals[0], problem.weights[0]);
    return out;
}

/// Barycenter for weights that may contain zeros: zero-weight marginals are
/// dropped (the formulation requires lambda_i > 0 and the limit is
/// continuous there), and a single surviving marginal is returned as-is.
inline BarycenterResult solve_barycenter_filtered(const std::vector<DensityField>& marginals,
                                                  const std::vector<double>& weights, const SolverConfig& config) {
    if (marginals.size() != weights.size()) throw BadWeights("weight count does not match marginal count");
    std::vector<DensityField> kept;
    std::vector<double> kept_w;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0.0) throw BadWeights("weights must be nonnegative");
        if (weights[i] > 0.0) {
            kept.push_back(marginals[i]);
            kept_w.push_back(weights[i]);
        }
    }
    if (kept.empty()) throw BadWeights("all weights are zero");
    if (kept.size() == 1) {
        BarycenterResult out;
        out.barycenter = kept.front();
        out.degenerate = true;
        return out;
    }
    return solve_barycenter(BarycenterProblem(std::move(kept), std::move(kept_w)), config);
}

/// Bilinear interpolation weights for corner images at lattice point (u, v).
inline std::vector<double> bilinear_weights(double u, double v) {
    return {(1.0 - u) * (1.0 - v), u * (1.0 - v), (1.0 - u) * v, u * v};
}

/// The s x s barycentric interpolation grid between four corner densities.
/// Cell (iu, iv) uses bilinear weights at (iu, iv)/(s-1); entries with a
/// zero weight fall back to the reduced problem (corners return the corner).
inline std::vector<DensityField> barycentric_grid(const std::vector<DensityField>& corners, int steps,
                                                  const SolverConfig& config) {
    if (corners.size() != 4) throw BadWeights("barycentric grid needs exactly 4 corner densities");
    if (steps < 2) throw BadWeights("need at least 2 interpolation steps");
    std::vector<DensityField> out;
    out.reserve(static_cast<std::size_t>(steps) * steps);
    for (int iv = 0; iv < steps; ++iv) {
        double v = static_cast<double>(iv) / (steps - 1);
        for (int iu = 0; iu < steps; ++iu) {
            double u = static_cast<double>(iu) / (steps - 1);
            out.push_back(solve_barycenter_filtered(corners, bilinear_weights(u, v), config).barycenter);
        }
    }
    return out;
}

/// Separable Gaussian blur (reflecting boundary), used by the sharpness proxy.
inline DensityField gaussian_blur(const DensityField& rho, double sigma_cells) {
    const Grid2D& g = rho.grid;
    int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma_cells)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        kernel[k + radius] = std::exp(-0.5 * (k * k) / (sigma_cells * sigma_cells));
        sum += kernel[k + radius];
    }
    for (double& k : kernel) k /= sum;

    auto reflect = [](int i, int n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
        return i;
    };
    DensityField tmp(g), out(g);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * rho(reflect(ix + k, g.nx), iy);
            tmp(ix, iy) = acc;
        }
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * tmp(ix, reflect(iy + k, g.ny));
            out(ix, iy) = acc;
        }
    return out;
}

/// Fraction of total mass sitting on cells above 10% of the peak density.
/// A sharp barycenter concentrates more of its mass above that line than a
/// blurred copy of itself does.
inline double mass_fraction_above(const DensityField& rho, double rel_threshold = 0.1) {
    double peak = 0.0;
    for (double v : rho.values) peak = std::max(peak, v);
    if (peak <= 0.0) return 0.0;
    double cut = rel_threshold * peak;
    double above = 0.0, total = 0.0;
    for (double v : rho.values) {
        total += v;
        if (v > cut) above += v;
    }
    return total > 0.0 ? above / total : 0.0;
}

inline bool passes_sharpness_proxy(const DensityField& rho, double blur_sigma_cells = 2.0) {
    return mass_fraction_above(rho) > mass_fraction_above(gaussian_blur(rho, blur_sigma_cells));
}

}  // namespace mmot
