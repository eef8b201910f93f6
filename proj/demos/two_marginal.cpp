// Minimal two-marginal run: transport one Gaussian blob onto another and
// print the convergence trace.

#include <cstdio>

#include "mmot/shapes.hpp"
#include "mmot/solver.hpp"

int main() {
    using namespace mmot;
    Grid2D grid(128, 128);
    std::vector<DensityField> mus = {
        density_from_image(grid, shapes::gaussian(grid, 0.35, 0.4, 0.08), 1e-6),
        density_from_image(grid, shapes::gaussian(grid, 0.62, 0.58, 0.1), 1e-6),
    };
    MmotProblem problem(CostGraph(2, {{0, 1, PairwiseCost(1.0)}}), std::move(mus));

    SolverConfig cfg;
    cfg.max_iters = 60;
    cfg.tol_residual = 1e-5;
    SolveResult res = solve(problem, cfg);

    std::printf("%s", history_csv(res.history).c_str());
    std::printf("# objective %.9f after %d iterations (%s)\n", res.objective, res.iterations,
                res.stop_reason.c_str());
    return res.converged ? 0 : 1;
}
