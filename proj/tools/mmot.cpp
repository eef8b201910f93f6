// mmot: multimarginal optimal transport on grids.
//
//   mmot solve --config problem.cfg
//   mmot barycenter --weights 0.25,0.25,0.25,0.25 a.pgm b.pgm c.pgm d.pgm -o out.pgm
//   mmot atlas --steps 3 a.pgm b.pgm c.pgm d.pgm -o outdir
//   mmot validate all
//
// Exit codes: 0 success/converged, 1 bad arguments or config, 2 I/O error,
// 3 solver stopped without converging, 4 failed validation checks.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"

#include "mmot/barycenter.hpp"
#include "mmot/config.hpp"
#include "mmot/image_io.hpp"
#include "mmot/solver.hpp"
#include "mmot/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitIo = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitValidation = 4;

mmot::DensityField load_density(const std::string& path, double floor) {
    mmot::GrayImage img = mmot::read_image(path);
    mmot::Grid2D grid(img.width, img.height);
    return mmot::density_from_image(grid, img.pixels, floor);
}

struct SolverFlags {
    int max_iters = -1;
    double tol = -1.0;
    int fixed_root = 0;  // 1-based; 0 = unset
    bool cycle = false;

    void apply(mmot::SolverConfig& cfg) const {
        if (max_iters >= 0) cfg.max_iters = max_iters;
        if (tol >= 0.0) cfg.tol_residual = tol;
        if (fixed_root > 0) {
            cfg.root_mode = mmot::RootMode::fixed;
            cfg.fixed_root = fixed_root - 1;
        }
        if (cycle) cfg.root_mode = mmot::RootMode::cycle;
    }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
    cmd->add_option("--max-iters", flags.max_iters, "iteration cap");
    cmd->add_option("--tol", flags.tol, "marginal L1 residual tolerance");
    cmd->add_option("--root", flags.fixed_root, "fixed root node (1-based, on the unrolled tree)");
    cmd->add_flag("--cycle", flags.cycle, "cycle the root through all tree nodes (default)");
}

int cmd_solve(const std::string& config_path, const SolverFlags& flags) {
    mmot::SolveFileConfig cfg = mmot::load_solve_config(config_path);
    flags.apply(cfg.solver);

    std::vector<mmot::DensityField> marginals;
    for (const auto& path : cfg.graph.marginal_paths) marginals.push_back(load_density(path, cfg.floor));
    for (const auto& mu : marginals)
        if (mu.grid != marginals.front().grid)
            throw mmot::ParseError("marginal images have mismatched dimensions");

    const int node_count = static_cast<int>(marginals.size());
    mmot::MmotProblem problem(mmot::CostGraph(node_count, cfg.graph.edges), std::move(marginals));
    mmot::SolveResult result = mmot::solve(problem, cfg.solver);

    if (!cfg.history_path.empty()) {
        std::ofstream hist(cfg.history_path);
        if (!hist) throw mmot::IoError("cannot write " + cfg.history_path);
        hist << mmot::history_csv(result.history);
    }
    if (!cfg.potentials_prefix.empty()) {
        for (std::size_t i = 0; i < result.potentials.size(); ++i) {
            const auto& f = result.potentials[i];
            mmot::write_field_raw(cfg.potentials_prefix + std::to_string(i + 1) + ".f64", f.grid, f.values);
        }
    }
    std::printf("objective %.12g\n", result.objective);
    std::printf("iterations %d\n", result.iterations);
    std::printf("converged %s (%s)\n", result.converged ? "yes" : "no", result.stop_reason.c_str());
    return result.converged ? kExitOk : kExitNotConverged;
}

std::vector<double> parse_weights(const std::string& csv) {
    std::vector<double> w;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        w.push_back(mmot::detail::parse_double(item, "weight"));
    }
    if (w.empty()) throw mmot::ParseError("no weights given");
    return w;
}

int cmd_barycenter(const std::vector<std::string>& images, const std::string& weights_csv, const std::string& out,
                   double floor, const SolverFlags& flags) {
    std::vector<double> weights = parse_weights(weights_csv);
    if (weights.size() != images.size())
        throw mmot::ParseError("got " + std::to_string(weights.size()) + " weights for " +
                               std::to_string(images.size()) + " images");
    double total = 0.0;
    for (double w : weights) total += w;
    if (std::abs(total - 1.0) > 1e-9) throw mmot::BadWeights("weights must sum to 1");

    std::vector<mmot::DensityField> marginals;
    for (const auto& path : images) marginals.push_back(load_density(path, floor));

    mmot::SolverConfig cfg;
    cfg.max_iters = 300;
    cfg.tol_residual = 1e-5;
    flags.apply(cfg);
    mmot::BarycenterResult res = mmot::solve_barycenter_filtered(marginals, weights, cfg);
    mmot::write_image(out, mmot::to_image(res.barycenter.grid, res.barycenter.values));
    if (!res.degenerate) {
        std::printf("objective %.12g\n", res.solve.objective);
        std::printf("converged %s (%s)\n", res.solve.converged ? "yes" : "no", res.solve.stop_reason.c_str());
    }
    return kExitOk;
}

int cmd_atlas(const std::vector<std::string>& images, int steps, const std::string& outdir, double floor, int jobs,
              const SolverFlags& flags) {
    if (images.size() != 4) throw mmot::ParseError("atlas needs exactly 4 corner images");
    if (steps < 2) throw mmot::ParseError("--steps must be at least 2");
    std::filesystem::create_directories(outdir);

    std::vector<mmot::GrayImage> raw;
    std::vector<mmot::DensityField> marginals;
    for (const auto& path : images) {
        raw.push_back(mmot::read_image(path));
        mmot::Grid2D grid(raw.back().width, raw.back().height);
        marginals.push_back(mmot::density_from_image(grid, raw.back().pixels, floor));
    }
    for (const auto& mu : marginals)
        if (mu.grid != marginals.front().grid) throw mmot::ParseError("corner images have mismatched dimensions");

    mmot::SolverConfig cfg;
    cfg.max_iters = 200;
    cfg.tol_residual = 5e-4;
    flags.apply(cfg);

    struct Cell {
        int iu, iv;
        std::vector<double> weights;
        std::string file;
    };
    std::vector<Cell> cells;
    for (int iv = 0; iv < steps; ++iv)
        for (int iu = 0; iu < steps; ++iu) {
            double u = static_cast<double>(iu) / (steps - 1);
            double v = static_cast<double>(iv) / (steps - 1);
            cells.push_back({iu, iv, mmot::bilinear_weights(u, v),
                             "tile_" + std::to_string(iu) + "_" + std::to_string(iv) + ".pgm"});
        }

    std::mutex next_mutex;
    std::size_t next = 0;
    auto worker = [&]() {
        while (true) {
            std::size_t mine;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next >= cells.size()) return;
                mine = next++;
            }
            const Cell& cell = cells[mine];
            int survivors = 0, last = -1;
            for (int i = 0; i < 4; ++i)
                if (cell.weights[i] > 0.0) {
                    ++survivors;
                    last = i;
                }
            mmot::DensityField bary;
            if (survivors == 1) {
                // a degenerate corner: re-emit the input image unchanged
                mmot::Grid2D grid(raw[last].width, raw[last].height);
                bary = mmot::density_from_image(grid, raw[last].pixels, 0.0);
            } else {
                bary = mmot::solve_barycenter_filtered(marginals, cell.weights, cfg).barycenter;
            }
            mmot::write_image(outdir + "/" + cell.file, mmot::to_image(bary.grid, bary.values));
        }
    };
    int nthreads = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ofstream index(outdir + "/atlas_index.txt");
    if (!index) throw mmot::IoError("cannot write atlas index");
    index << "# iu iv w1 w2 w3 w4 file\n";
    for (const auto& cell : cells) {
        index << cell.iu << " " << cell.iv;
        for (double w : cell.weights) index << " " << w;
        index << " " << cell.file << "\n";
    }
    std::printf("wrote %zu tiles to %s\n", cells.size(), outdir.c_str());
    return kExitOk;
}

int cmd_validate(const std::vector<std::string>& names) {
    using mmot::validate::suites;
    std::vector<const mmot::validate::Suite*> chosen;
    for (const auto& name : names) {
        if (name == "all") {
            chosen.clear();
            for (const auto& s : suites()) chosen.push_back(&s);
            break;
        }
        const mmot::validate::Suite* found = nullptr;
        for (const auto& s : suites())
            if (s.name == name) found = &s;
        if (!found) {
            std::fprintf(stderr, "unknown suite '%s'; known suites:", name.c_str());
            for (const auto& s : suites()) std::fprintf(stderr, " %s", s.name.c_str());
            std::fprintf(stderr, "\n");
            return kExitParse;
        }
        chosen.push_back(found);
    }

    std::vector<mmot::validate::CheckResult> results;
    for (const auto* suite : chosen) {
        auto part = suite->run();
        results.insert(results.end(), part.begin(), part.end());
    }
    std::printf("1..%zu\n", results.size());
    int failures = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        if (r.pass)
            std::printf("ok %zu - %s%s%s\n", i + 1, r.name.c_str(), r.detail.empty() ? "" : " # ",
                        r.detail.c_str());
        else {
            std::printf("not ok %zu - %s%s%s\n", i + 1, r.name.c_str(), r.detail.empty() ? "" : " # ",
                        r.detail.c_str());
            ++failures;
        }
    }
    return failures == 0 ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multimarginal optimal transport solver"};
    app.require_subcommand(1);

    std::string config_path;
    SolverFlags solve_flags;
    auto* solve = app.add_subcommand("solve", "solve an MMOT problem described by a config file");
    solve->add_option("--config", config_path, "problem config file")->required();
    add_solver_flags(solve, solve_flags);

    std::vector<std::string> bary_images;
    std::string bary_weights, bary_out = "barycenter.pgm";
    double bary_floor = 1e-6;
    SolverFlags bary_flags;
    auto* bary = app.add_subcommand("barycenter", "Wasserstein barycenter of grayscale images");
    bary->add_option("images", bary_images, "marginal images (PGM/PNG)")->required()->expected(-2);
    bary->add_option("--weights", bary_weights, "comma-separated positive weights summing to 1")->required();
    bary->add_option("-o,--out", bary_out, "output image path");
    bary->add_option("--floor", bary_floor, "density floor relative to the max intensity");
    add_solver_flags(bary, bary_flags);

    std::vector<std::string> atlas_images;
    std::string atlas_out = "atlas";
    int atlas_steps = 3, atlas_jobs = 1;
    double atlas_floor = 1e-6;
    SolverFlags atlas_flags;
    auto* atlas = app.add_subcommand("atlas", "grid of barycenters bilinearly interpolating 4 corner images");
    atlas->add_option("images", atlas_images, "four corner images")->required()->expected(4);
    atlas->add_option("--steps", atlas_steps, "lattice resolution per axis");
    atlas->add_option("-o,--out", atlas_out, "output directory");
    atlas->add_option("--jobs", atlas_jobs, "worker threads");
    atlas->add_option("--floor", atlas_floor, "density floor relative to the max intensity");
    add_solver_flags(atlas, atlas_flags);

    std::vector<std::string> validate_names;
    auto* validate = app.add_subcommand("validate", "run verification suites (TAP output)");
    validate->add_option("suites", validate_names, "suite names or 'all'")->required()->expected(-1);

    unsigned seed = 0;
    app.add_option("--seed", seed, "seed for randomized diagnostics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitParse;
    }

    try {
        if (*solve) return cmd_solve(config_path, solve_flags);
        if (*bary) return cmd_barycenter(bary_images, bary_weights, bary_out, bary_floor, bary_flags);
        if (*atlas) return cmd_atlas(atlas_images, atlas_steps, atlas_out, atlas_floor, atlas_jobs, atlas_flags);
        if (*validate) return cmd_validate(validate_names);
    } catch (const mmot::IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kExitIo;
    } catch (const mmot::ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitParse;
    } catch (const mmot::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitParse;
    }
    return kExitParse;
}
