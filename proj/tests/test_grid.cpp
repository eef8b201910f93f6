#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <random>

#include "mmot/grid.hpp"
#include "mmot/image_io.hpp"

using namespace mmot;

TEST_CASE("density_from_image basics") {
    SECTION("constant image becomes the uniform density") {
        Grid2D g(8, 6);
        std::vector<double> px(g.size(), 42.0);
        DensityField mu = density_from_image(g, px, 0.0);
        for (double v : mu.values) REQUIRE(v == Catch::Approx(1.0).margin(1e-14));
        REQUIRE(std::abs(mu.mass() - 1.0) <= 1e-12);
    }
    SECTION("all-zero image with zero floor is rejected") {
        Grid2D g(4, 4);
        std::vector<double> px(g.size(), 0.0);
        REQUIRE_THROWS_AS(density_from_image(g, px, 0.0), AllZeroInput);
    }
    SECTION("single nonzero pixel concentrates all mass") {
        Grid2D g(4, 4);
        std::vector<double> px(g.size(), 0.0);
        px[g.index(2, 1)] = 5.0;
        DensityField mu = density_from_image(g, px, 0.0);
        REQUIRE(mu(2, 1) == Catch::Approx(16.0).margin(1e-12));
        for (int i = 0; i < g.size(); ++i)
            if (i != g.index(2, 1)) REQUIRE(mu.values[i] == 0.0);
    }
    SECTION("floor keeps empty regions positive") {
        Grid2D g(4, 4);
        std::vector<double> px(g.size(), 0.0);
        px[0] = 10.0;
        DensityField mu = density_from_image(g, px, 1e-3);
        for (double v : mu.values) REQUIRE(v > 0.0);
        REQUIRE(std::abs(mu.mass() - 1.0) <= 1e-12);
    }
    SECTION("random images always yield valid densities") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> u(0.0, 10.0);
        for (int trial = 0; trial < 25; ++trial) {
            Grid2D g(2 + trial % 13, 2 + (trial * 7) % 11);
            std::vector<double> px(g.size());
            for (double& v : px) v = u(rng);
            DensityField mu = density_from_image(g, px, trial % 2 ? 1e-6 : 0.0);
            for (double v : mu.values) REQUIRE(v >= 0.0);
            REQUIRE(std::abs(mu.mass() - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("integrate_against") {
    Grid2D g(10, 10);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> px(g.size());
    for (double& v : px) v = u(rng) + 0.1;
    DensityField mu = density_from_image(g, px, 0.0);

    SECTION("constants integrate to themselves") {
        REQUIRE(integrate_against(PotentialField(g, 3.0), mu) == Catch::Approx(3.0).margin(1e-12));
        REQUIRE(integrate_against(PotentialField(g), mu) == 0.0);
    }
    SECTION("indicator of the left half against the uniform density") {
        DensityField unif = density_from_image(g, std::vector<double>(g.size(), 1.0), 0.0);
        PotentialField half(g);
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx / 2; ++ix) half(ix, iy) = 1.0;
        REQUIRE(integrate_against(half, unif) == Catch::Approx(0.5).margin(1e-12));
    }
    SECTION("linearity") {
        PotentialField f(g), h(g);
        for (int i = 0; i < g.size(); ++i) {
            f.values[i] = u(rng) - 0.5;
            h.values[i] = u(rng) - 0.5;
        }
        PotentialField sum = f;
        sum += h;
        double lhs = integrate_against(sum, mu);
        double rhs = integrate_against(f, mu) + integrate_against(h, mu);
        REQUIRE(lhs == Catch::Approx(rhs).margin(1e-12));
    }
    SECTION("grid mismatch is rejected") {
        PotentialField f(Grid2D(10, 11));
        REQUIRE_THROWS_AS(integrate_against(f, mu), GridMismatch);
    }
}

TEST_CASE("l1_distance") {
    Grid2D g(8, 8);
    std::vector<double> left(g.size(), 0.0), right(g.size(), 0.0);
    for (int iy = 0; iy < g.ny; ++iy) {
        left[g.index(0, iy)] = 1.0;
        right[g.index(g.nx - 1, iy)] = 1.0;
    }
    DensityField a = density_from_image(g, left, 0.0);
    DensityField b = density_from_image(g, right, 0.0);
    REQUIRE(l1_distance(a, a) == 0.0);
    REQUIRE(l1_distance(a, b) == Catch::Approx(2.0).margin(1e-12));
    REQUIRE_THROWS_AS(l1_distance(a, DensityField(Grid2D(8, 9))), GridMismatch);
}

TEST_CASE("image I/O round trips") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "mmot_grid_test";
    fs::create_directories(dir);

    Grid2D g(13, 9);
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> byte(0, 255);
    GrayImage img;
    img.width = g.nx;
    img.height = g.ny;
    img.pixels.resize(g.size());
    for (double& v : img.pixels) v = byte(rng);
    img.pixels[5] = 255.0;  // pin the max so rescaling is the identity

    SECTION("PGM 8-bit") {
        std::string path = (dir / "a.pgm").string();
        write_pgm(path, img);
        GrayImage back = read_pgm(path);
        REQUIRE(back.width == img.width);
        REQUIRE(back.height == img.height);
        for (int i = 0; i < g.size(); ++i) REQUIRE(back.pixels[i] == img.pixels[i]);
    }
    SECTION("PGM 16-bit read") {
        std::string path = (dir / "b.pgm").string();
        std::ofstream out(path, std::ios::binary);
        out << "P5\n2 2\n65535\n";
        unsigned char data[8] = {0x01, 0x00, 0x00, 0xFF, 0xAB, 0xCD, 0xFF, 0xFF};
        out.write(reinterpret_cast<char*>(data), 8);
        out.close();
        GrayImage back = read_pgm(path);
        REQUIRE(back.pixels[0] == 256.0);
        REQUIRE(back.pixels[1] == 255.0);
        REQUIRE(back.pixels[2] == 0xAB * 256.0 + 0xCD);
        REQUIRE(back.pixels[3] == 65535.0);
    }
    SECTION("PNG") {
        std::string path = (dir / "c.png").string();
        write_png(path, img);
        GrayImage back = read_png(path);
        REQUIRE(back.width == img.width);
        for (int i = 0; i < g.size(); ++i) REQUIRE(back.pixels[i] == img.pixels[i]);
    }
    SECTION("raw field dump") {
        std::string path = (dir / "f.f64").string();
        std::vector<double> values(g.size());
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        for (double& v : values) v = u(rng);
        write_field_raw(path, g, values);
        auto [grid, back] = read_field_raw(path);
        REQUIRE(grid == g);
        for (int i = 0; i < g.size(); ++i) REQUIRE(back[i] == values[i]);
        // header layout: magic, then nx, ny as 32-bit LE
        std::ifstream in(path, std::ios::binary);
        char head[16];
        in.read(head, 16);
        REQUIRE(std::string(head, 7) == "MMOTF64");
        REQUIRE(static_cast<unsigned char>(head[8]) == static_cast<unsigned char>(g.nx));
        REQUIRE(static_cast<unsigned char>(head[12]) == static_cast<unsigned char>(g.ny));
    }
    SECTION("missing file") { REQUIRE_THROWS_AS(read_pgm((dir / "nope.pgm").string()), IoError); }
}
