#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mmot/image_io.hpp"
#include "mmot/shapes.hpp"

// Drives the installed binary end to end. The test runner exports MMOT_BIN.

namespace fs = std::filesystem;
using namespace mmot;

namespace {

std::string mmot_bin() {
    const char* bin = std::getenv("MMOT_BIN");
    REQUIRE(bin != nullptr);
    return bin;
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args, const fs::path& dir) {
    fs::path out = dir / "cmd_output.txt";
    std::string cmd = mmot_bin() + " " + args + " > " + out.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WEXITSTATUS(rc);
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    res.output = ss.str();
    return res;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("mmot_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_disk_image(const fs::path& path, int n, double cx, double cy, double r) {
    Grid2D g(n, n);
    GrayImage img = to_image(g, shapes::disk(g, cx, cy, r));
    for (double& p : img.pixels) p *= 255.0;
    write_pgm(path.string(), img);
}

std::string strip_wall_ms(const std::string& csv) {
    std::stringstream in(csv), out;
    std::string line;
    while (std::getline(in, line)) {
        auto last = line.rfind(',');
        out << line.substr(0, last) << "\n";
    }
    return out.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("solve subcommand end to end") {
    fs::path dir = fresh_dir("solve");
    write_disk_image(dir / "a.pgm", 32, 0.4, 0.5, 0.15);
    write_disk_image(dir / "b.pgm", 32, 0.4, 0.5, 0.15);  // identical marginals

    std::ofstream cfg(dir / "problem.cfg");
    cfg << "[graph]\n"
        << "marginal 1 " << (dir / "a.pgm").string() << "\n"
        << "marginal 2 " << (dir / "b.pgm").string() << "\n"
        << "edge 1 2 1.0\n"
        << "[solver]\n"
        << "max_iters = 50\n"
        << "root_mode = cycle\n"
        << "[output]\n"
        << "history = " << (dir / "history.csv").string() << "\n"
        << "potentials_prefix = " << (dir / "f_").string() << "\n";
    cfg.close();

    RunResult res = run("solve --config " + (dir / "problem.cfg").string(), dir);
    INFO(res.output);
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.output.find("objective 0") != std::string::npos);
    REQUIRE(res.output.find("converged yes") != std::string::npos);
    REQUIRE(fs::exists(dir / "history.csv"));
    REQUIRE(fs::exists(dir / "f_1.f64"));
    REQUIRE(fs::exists(dir / "f_2.f64"));
    auto [grid, values] = read_field_raw((dir / "f_1.f64").string());
    REQUIRE(grid.nx == 32);
    REQUIRE(grid.ny == 32);
}

TEST_CASE("solve runs are deterministic up to wall time") {
    fs::path dir = fresh_dir("determinism");
    write_disk_image(dir / "a.pgm", 32, 0.3, 0.45, 0.12);
    write_disk_image(dir / "b.pgm", 32, 0.55, 0.55, 0.14);

    std::ofstream cfg(dir / "problem.cfg");
    cfg << "[graph]\n"
        << "marginal 1 " << (dir / "a.pgm").string() << "\n"
        << "marginal 2 " << (dir / "b.pgm").string() << "\n"
        << "edge 1 2 1.0\n"
        << "[solver]\n"
        << "max_iters = 12\n"
        << "tol_residual = 1e-9\n"
        << "[output]\n"
        << "history = " << (dir / "history.csv").string() << "\n";
    cfg.close();

    std::string first, second;
    for (std::string* target : {&first, &second}) {
        RunResult res = run("solve --config " + (dir / "problem.cfg").string(), dir);
        INFO(res.output);
        REQUIRE((res.exit_code == 0 || res.exit_code == 3));
        *target = strip_wall_ms(slurp(dir / "history.csv"));
        fs::remove(dir / "history.csv");
    }
    REQUIRE(!first.empty());
    REQUIRE(first == second);
}

TEST_CASE("solve error paths") {
    fs::path dir = fresh_dir("errors");
    SECTION("missing image gives exit 2 and names the path") {
        std::ofstream cfg(dir / "problem.cfg");
        cfg << "[graph]\nmarginal 1 " << (dir / "missing.pgm").string() << "\n"
            << "marginal 2 " << (dir / "missing.pgm").string() << "\nedge 1 2 1\n";
        cfg.close();
        RunResult res = run("solve --config " + (dir / "problem.cfg").string(), dir);
        REQUIRE(res.exit_code == 2);
        REQUIRE(res.output.find("missing.pgm") != std::string::npos);
    }
    SECTION("malformed config gives exit 1") {
        std::ofstream cfg(dir / "bad.cfg");
        cfg << "[graph]\nedge 1 1 1\n";
        cfg.close();
        RunResult res = run("solve --config " + (dir / "bad.cfg").string(), dir);
        REQUIRE(res.exit_code == 1);
    }
    SECTION("config without marginals gives exit 1") {
        std::ofstream cfg(dir / "empty.cfg");
        cfg << "[solver]\nmax_iters = 3\n";
        cfg.close();
        RunResult res = run("solve --config " + (dir / "empty.cfg").string(), dir);
        REQUIRE(res.exit_code == 1);
    }
}

TEST_CASE("barycenter subcommand") {
    fs::path dir = fresh_dir("bary");
    write_disk_image(dir / "a.pgm", 32, 0.5, 0.5, 0.16);
    fs::copy_file(dir / "a.pgm", dir / "b.pgm");

    SECTION("identical inputs reproduce the input") {
        RunResult res = run("barycenter --weights 0.5,0.5 " + (dir / "a.pgm").string() + " " +
                                (dir / "b.pgm").string() + " -o " + (dir / "out.pgm").string(),
                            dir);
        INFO(res.output);
        REQUIRE(res.exit_code == 0);
        GrayImage in = read_pgm((dir / "a.pgm").string());
        GrayImage out = read_pgm((dir / "out.pgm").string());
        double diff = 0.0, total = 0.0;
        for (std::size_t i = 0; i < in.pixels.size(); ++i) {
            diff += std::abs(in.pixels[i] - out.pixels[i]);
            total += std::abs(in.pixels[i]);
        }
        REQUIRE(diff / total <= 1e-3);
    }
    SECTION("weights that do not sum to one give exit 1") {
        RunResult res = run("barycenter --weights 0.5,0.4 " + (dir / "a.pgm").string() + " " +
                                (dir / "b.pgm").string() + " -o " + (dir / "out.pgm").string(),
                            dir);
        REQUIRE(res.exit_code == 1);
    }
}

TEST_CASE("atlas corners are byte-identical to the normalized inputs") {
    fs::path dir = fresh_dir("atlas");
    write_disk_image(dir / "a.pgm", 24, 0.35, 0.35, 0.12);
    write_disk_image(dir / "b.pgm", 24, 0.65, 0.35, 0.12);
    write_disk_image(dir / "c.pgm", 24, 0.35, 0.65, 0.12);
    write_disk_image(dir / "d.pgm", 24, 0.65, 0.65, 0.12);

    RunResult res = run("atlas --steps 2 " + (dir / "a.pgm").string() + " " + (dir / "b.pgm").string() + " " +
                            (dir / "c.pgm").string() + " " + (dir / "d.pgm").string() + " -o " +
                            (dir / "tiles").string(),
                        dir);
    INFO(res.output);
    REQUIRE(res.exit_code == 0);
    REQUIRE(fs::exists(dir / "tiles" / "atlas_index.txt"));
    REQUIRE(slurp(dir / "tiles" / "tile_0_0.pgm") == slurp(dir / "a.pgm"));
    REQUIRE(slurp(dir / "tiles" / "tile_1_0.pgm") == slurp(dir / "b.pgm"));
    REQUIRE(slurp(dir / "tiles" / "tile_0_1.pgm") == slurp(dir / "c.pgm"));
    REQUIRE(slurp(dir / "tiles" / "tile_1_1.pgm") == slurp(dir / "d.pgm"));
}

TEST_CASE("validate subcommand") {
    fs::path dir = fresh_dir("validate");
    SECTION("a fast suite runs and emits TAP") {
        RunResult res = run("validate poisson", dir);
        INFO(res.output);
        REQUIRE(res.exit_code == 0);
        REQUIRE(res.output.find("1..") != std::string::npos);
        REQUIRE(res.output.find("ok 1 -") != std::string::npos);
    }
    SECTION("unknown suites give exit 1") {
        RunResult res = run("validate bogus", dir);
        REQUIRE(res.exit_code == 1);
    }
}
