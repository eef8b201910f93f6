#include <catch2/catch_amalgamated.hpp>

#include "mmot/barycenter.hpp"
#include "mmot/shapes.hpp"

using namespace mmot;

TEST_CASE("gs_cost_graph builds the complete weighted graph") {
    SECTION("two equal weights give a single quarter-weight edge") {
        CostGraph g = gs_cost_graph({0.5, 0.5});
        REQUIRE(g.node_count() == 2);
        REQUIRE(g.edges().size() == 1);
        REQUIRE(g.edges()[0].cost.weight == Catch::Approx(0.25));
    }
    SECTION("four equal weights give K4 with weight 1/16, unrolling to 7 nodes") {
        CostGraph g = gs_cost_graph({0.25, 0.25, 0.25, 0.25});
        REQUIRE(g.edges().size() == 6);
        for (const auto& e : g.edges()) REQUIRE(e.cost.weight == Catch::Approx(1.0 / 16));
        REQUIRE(unroll(g).tree.node_count() == 7);
    }
    SECTION("edge count is m(m-1)/2") {
        CostGraph g = gs_cost_graph({0.2, 0.2, 0.2, 0.2, 0.2});
        REQUIRE(g.edges().size() == 10);
    }
    SECTION("bad weights are rejected") {
        REQUIRE_THROWS_AS(gs_cost_graph({1.0}), BadWeights);
        REQUIRE_THROWS_AS(gs_cost_graph({0.5, 0.0, 0.5}), BadWeights);
        REQUIRE_THROWS_AS(BarycenterProblem({DensityField(Grid2D(4, 4), std::vector<double>(16, 1.0)),
                                             DensityField(Grid2D(4, 4), std::vector<double>(16, 1.0))},
                                            {0.7, 0.7}),
                          BadWeights);
    }
}

TEST_CASE("identical marginals are their own barycenter") {
    Grid2D g(48, 48);
    DensityField mu = density_from_image(g, shapes::disk(g, 0.5, 0.45, 0.18), 1e-6);
    SECTION("extraction with zero potential is exact") {
        DensityField out = extract_barycenter(PotentialField(g), mu, 0.5);
        for (int i = 0; i < g.size(); ++i) REQUIRE(out.values[i] == mu.values[i]);
    }
    SECTION("solving the pair problem keeps the density") {
        SolverConfig cfg;
        cfg.max_iters = 40;
        BarycenterResult res = solve_barycenter(BarycenterProblem({mu, mu}, {0.5, 0.5}), cfg);
        REQUIRE(l1_distance(res.barycenter, mu) <= 1e-3);
        REQUIRE(std::abs(res.barycenter.mass() - 1.0) <= 1e-12);
        for (double v : res.barycenter.values) REQUIRE(v >= 0.0);
    }
}

TEST_CASE("translated blobs meet at the weighted midpoint (coarse grid)") {
    Grid2D g(64, 64);
    double r = 0.12, x0 = 0.3, y0 = 0.5, dx = 20.0 / 64;
    DensityField a = density_from_image(g, shapes::disk(g, x0, y0, r), 1e-6);
    DensityField b = density_from_image(g, shapes::disk(g, x0 + dx, y0, r), 1e-6);
    DensityField mid = density_from_image(g, shapes::disk(g, x0 + dx / 2, y0, r), 1e-6);
    SolverConfig cfg;
    cfg.max_iters = 200;
    cfg.tol_residual = 1e-5;
    BarycenterResult res = solve_barycenter(BarycenterProblem({a, b}, {0.5, 0.5}), cfg);
    REQUIRE(l1_distance(res.barycenter, mid) <= 0.1);
}

TEST_CASE("degenerate weights short-circuit to the marginals") {
    Grid2D g(32, 32);
    std::vector<DensityField> corners = {
        density_from_image(g, shapes::disk(g, 0.4, 0.4, 0.15), 1e-6),
        density_from_image(g, shapes::square(g, 0.6, 0.4, 0.12), 1e-6),
        density_from_image(g, shapes::disk(g, 0.4, 0.6, 0.1), 1e-6),
        density_from_image(g, shapes::square(g, 0.6, 0.6, 0.14), 1e-6)};
    SolverConfig cfg;
    cfg.max_iters = 30;
    // a 2x2 lattice consists solely of the four corner weight vectors
    std::vector<DensityField> atlas = barycentric_grid(corners, 2, cfg);
    REQUIRE(atlas.size() == 4);
    REQUIRE(l1_distance(atlas[0], corners[0]) == 0.0);
    REQUIRE(l1_distance(atlas[1], corners[1]) == 0.0);
    REQUIRE(l1_distance(atlas[2], corners[2]) == 0.0);
    REQUIRE(l1_distance(atlas[3], corners[3]) == 0.0);
    REQUIRE_THROWS_AS(barycentric_grid(corners, 1, cfg), BadWeights);
}

TEST_CASE("bilinear weights hit the corners and the center") {
    auto w00 = bilinear_weights(0.0, 0.0);
    REQUIRE(w00 == std::vector<double>{1.0, 0.0, 0.0, 0.0});
    auto mid = bilinear_weights(0.5, 0.5);
    for (double w : mid) REQUIRE(w == Catch::Approx(0.25));
}

TEST_CASE("sharpness proxy separates crisp shapes from blurred ones") {
    Grid2D g(64, 64);
    DensityField disk = density_from_image(g, shapes::disk(g, 0.5, 0.5, 0.2), 1e-6);
    REQUIRE(passes_sharpness_proxy(disk));
    DensityField blurred = gaussian_blur(disk, 2.0);
    REQUIRE(mass_fraction_above(disk) > mass_fraction_above(blurred));
    REQUIRE(std::abs(blurred.mass() - 1.0) <= 1e-9);
}
