#include <cstdio>

#include "mmot/barycenter.hpp"
#include "mmot/shapes.hpp"
#include "mmot/solver.hpp"
#include "mmot/validate.hpp"

using namespace mmot;

static DensityField gaussian_density(const Grid2D& g, double cx, double cy, double s) {
    std::vector<double> px(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double dx = g.x_center(ix) - cx, dy = g.y_center(iy) - cy;
            px[g.index(ix, iy)] = std::exp(-0.5 * (dx * dx + dy * dy) / (s * s));
        }
    return density_from_image(g, px, 1e-6);
}

int main(int argc, char** argv) {
    std::string which = argc > 1 ? argv[1] : "blob";
    if (which == "blob") {
        Grid2D g(64, 64);
        double r = 0.12, x0 = 0.3, y0 = 0.5, dx = 20.0 / 64;
        DensityField a = density_from_image(g, shapes::disk(g, x0, y0, r), 1e-6);
        DensityField b = density_from_image(g, shapes::disk(g, x0 + dx, y0, r), 1e-6);
        DensityField mid = density_from_image(g, shapes::disk(g, x0 + dx / 2, y0, r), 1e-6);
        SolverConfig cfg;
        cfg.max_iters = 200;
        cfg.tol_residual = 1e-5;
        BarycenterResult res = solve_barycenter(BarycenterProblem({a, b}, {0.5, 0.5}), cfg);
        std::printf("%s", history_csv(res.solve.history).c_str());
        std::printf("stop=%s iters=%d obj=%.8g L1(bary,mid)=%.6g L1(bary,a)=%.6g\n",
                    res.solve.stop_reason.c_str(), res.solve.iterations, res.solve.objective,
                    l1_distance(res.barycenter, mid), l1_distance(res.barycenter, a));
    } else if (which == "suite") {
        const std::string name = argc > 2 ? argv[2] : "table1";
        for (const auto& s : mmot::validate::suites()) {
            if (s.name != name) continue;
            auto results = s.run();
            for (const auto& r : results)
                std::printf("%s  %s -- %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        }
    } else if (which == "gluing") {
        Grid2D g(256, 256);
        std::vector<DensityField> mus;
        auto fd = [&](std::vector<double> px) { return density_from_image(g, px, 1e-6); };
        // gentle deformations of one blob
        mus.push_back(fd(shapes::disk(g, 0.5, 0.5, 0.25)));
        {   // ellipse
            std::vector<double> px(g.size(), 0.0);
            for (int iy = 0; iy < g.ny; ++iy)
                for (int ix = 0; ix < g.nx; ++ix) {
                    double u = (g.x_center(ix) - 0.5) / 0.30, v = (g.y_center(iy) - 0.5) / 0.20;
                    if (u * u + v * v <= 1.0) px[g.index(ix, iy)] = 1.0;
                }
            mus.push_back(fd(px));
        }
        mus.push_back(fd(shapes::disk(g, 0.55, 0.5, 0.22)));
        mus.push_back(fd(shapes::square(g, 0.5, 0.52, 0.2)));
        MmotProblem problem(CostGraph(4, {{0,1,PairwiseCost(1.0)},{1,2,PairwiseCost(1.0)},{2,3,PairwiseCost(1.0)}}), std::move(mus));
        SolverConfig cfg;
        cfg.root_mode = RootMode::cycle;
        cfg.max_iters = 80;
        cfg.tol_residual = 1e-9;
        cfg.tol_objective = 1e-13;
        if (argc > 2) cfg.grow = atof(argv[2]);
        if (argc > 3) cfg.armijo_slope = atof(argv[3]);
        if (argc > 4) cfg.sigma0 = atof(argv[4]);
        SolveResult chain = solve(problem, cfg);
        std::printf("chain: stop=%s iters=%d obj=%.10g\n", chain.stop_reason.c_str(), chain.iterations, chain.objective);
        for (const auto& r : chain.history)
            if (r.iter <= 20 || r.iter % 10 == 0)
                std::printf("  it %d obj %.10g resid %.4g sigma %.4g bt %d\n", r.iter, r.objective, r.residual, r.sigma, r.backtracks);
        double pair_sum = 0.0;
        for (int e = 0; e < 3; ++e) {
            std::vector<DensityField> mus = {problem.marginals[e], problem.marginals[e + 1]};
            MmotProblem two(CostGraph(2, {{0, 1, PairwiseCost(1.0)}}), std::move(mus));
            SolveResult r2 = solve(two, cfg);
            std::printf("pair %d: stop=%s iters=%d obj=%.10g\n", e, r2.stop_reason.c_str(), r2.iterations, r2.objective);
            pair_sum += r2.objective;
        }
        std::printf("pair_sum=%.10g chain=%.10g rel=%.4g\n", pair_sum, chain.objective,
                    std::abs(chain.objective - pair_sum) / pair_sum);
    } else if (which == "table2eq") {
        MmotProblem problem = mmot::validate::detail::overlap_instance(128);  // table2eq keeps old instance
        SolverConfig cyc;
        cyc.root_mode = RootMode::cycle;
        cyc.max_iters = 300;
        cyc.tol_residual = 1e-7;
        cyc.tol_objective = 1e-12;
        if (argc > 2) cyc.armijo_slope = atof(argv[2]);
        if (argc > 3) cyc.max_backtracks = atoi(argv[3]);
        SolveResult ra = solve(problem, cyc);
        std::printf("cycle: stop=%s iters=%d obj=%.12g resid=%.3g\n", ra.stop_reason.c_str(), ra.iterations,
                    ra.objective, ra.history.empty() ? -1.0 : ra.history.back().residual);
        for (int root = 0; root < 4; ++root) {
            SolverConfig fix = cyc;
            fix.root_mode = RootMode::fixed;
            fix.fixed_root = root;
            SolveResult rb = solve(problem, fix);
            std::printf("fixed %d: stop=%s iters=%d obj=%.12g diff=%.3g\n", root, rb.stop_reason.c_str(),
                        rb.iterations, rb.objective, std::abs(rb.objective - ra.objective));
        }
    } else if (which == "fixcyc") {
        Grid2D g(64, 64);
        MmotProblem problem(CostGraph(3, {{0, 1, PairwiseCost(1.0)}, {1, 2, PairwiseCost(1.0)}}),
                            {gaussian_density(g, 0.45, 0.5, 0.12), gaussian_density(g, 0.5, 0.5, 0.15),
                             gaussian_density(g, 0.55, 0.5, 0.10)});
        SolverConfig cyc;
        cyc.root_mode = RootMode::cycle;
        cyc.max_iters = 200;
        cyc.tol_residual = 1e-7;
        cyc.tol_objective = 1e-12;
        SolverConfig fix = cyc;
        fix.root_mode = RootMode::fixed;
        fix.fixed_root = 0;
        SolveResult ra = solve(problem, cyc);
        SolveResult rb = solve(problem, fix);
        std::printf("cycle: stop=%s iters=%d obj=%.10g last_resid=%.3g\n", ra.stop_reason.c_str(), ra.iterations,
                    ra.objective, ra.history.empty() ? -1 : ra.history.back().residual);
        std::printf("fixed: stop=%s iters=%d obj=%.10g last_resid=%.3g\n", rb.stop_reason.c_str(), rb.iterations,
                    rb.objective, rb.history.empty() ? -1 : rb.history.back().residual);
        for (std::size_t i = 0; i < ra.history.size(); ++i)
            std::printf("cycle it %zu obj %.12g resid %.4g sigma %.4g bt %d\n", i, ra.history[i].objective,
                        ra.history[i].residual, ra.history[i].sigma, ra.history[i].backtracks);
    }
    return 0;
}
// extra probe: cycle history tail
