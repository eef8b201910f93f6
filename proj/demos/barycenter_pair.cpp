// Interpolates two disk silhouettes and writes the halfway barycenter.

#include <cstdio>

#include "mmot/barycenter.hpp"
#include "mmot/image_io.hpp"
#include "mmot/shapes.hpp"

int main(int argc, char** argv) {
    using namespace mmot;
    const char* out = argc > 1 ? argv[1] : "barycenter_pair.pgm";
    Grid2D grid(128, 128);
    DensityField a = density_from_image(grid, shapes::disk(grid, 0.3, 0.5, 0.14), 1e-6);
    DensityField b = density_from_image(grid, shapes::disk(grid, 0.7, 0.5, 0.14), 1e-6);

    SolverConfig cfg;
    cfg.max_iters = 200;
    cfg.tol_residual = 1e-5;
    BarycenterResult res = solve_barycenter(BarycenterProblem({a, b}, {0.5, 0.5}), cfg);
    write_pgm(out, to_image(grid, res.barycenter.values));
    std::printf("wrote %s (objective %.6g, %s)\n", out, res.solve.objective, res.solve.stop_reason.c_str());
    return 0;
}
