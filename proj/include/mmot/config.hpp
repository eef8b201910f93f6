#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mmot/errors.hpp"
#include "mmot/solver.hpp"

// Plain-text problem descriptions consumed by the CLI. Sections in square
// brackets; [graph] holds one directive per line, other sections hold
// key = value pairs. Node indices are 1-based to match the usual figures.
//
//   [graph]
//   marginal 1 data/mu1.pgm
//   marginal 2 data/mu2.pgm
//   edge 1 2 1.0
//
//   [solver]
//   max_iters = 120
//   root_mode = cycle        # or fixed:2
//
//   [output]
//   history = out/history.csv
//   potentials_prefix = out/f_

namespace mmot {

struct GraphSpec {
    std::vector<std::string> marginal_paths;  // index 0 = node 1
    std::vector<CostEdge> edges;
};

struct SolveFileConfig {
    GraphSpec graph;
    SolverConfig solver;
    double floor = 1e-6;
    std::string history_path;
    std::string potentials_prefix;
    std::string barycenter_path;  // used by barycenter-style runs
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw ParseError(what + ": trailing characters in '" + s + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        throw ParseError(what + ": cannot parse number '" + s + "'");
    }
}

inline int parse_int(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw ParseError(what + ": trailing characters in '" + s + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        throw ParseError(what + ": cannot parse integer '" + s + "'");
    }
}

}  // namespace detail

inline void apply_solver_key(SolverConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "sigma0")
        cfg.sigma0 = value == "auto" ? 0.0 : detail::parse_double(value, key);
    else if (key == "armijo_slope")
        cfg.armijo_slope = detail::parse_double(value, key);
    else if (key == "shrink")
        cfg.shrink = detail::parse_double(value, key);
    else if (key == "grow")
        cfg.grow = detail::parse_double(value, key);
    else if (key == "max_iters")
        cfg.max_iters = detail::parse_int(value, key);
    else if (key == "tol_objective")
        cfg.tol_objective = detail::parse_double(value, key);
    else if (key == "tol_residual")
        cfg.tol_residual = detail::parse_double(value, key);
    else if (key == "deposit")
        cfg.deposit = value == "nearest" ? Deposit::nearest : Deposit::bilinear;
    else if (key == "root_mode") {
        if (value == "cycle")
            cfg.root_mode = RootMode::cycle;
        else if (value.rfind("fixed:", 0) == 0) {
            cfg.root_mode = RootMode::fixed;
            cfg.fixed_root = detail::parse_int(value.substr(6), key) - 1;  // 1-based in files
        } else
            throw ParseError("root_mode must be 'cycle' or 'fixed:<node>'");
    } else
        throw ParseError("unknown solver key '" + key + "'");
}

inline SolveFileConfig parse_solve_config(std::istream& in) {
    SolveFileConfig cfg;
    std::string line, section;
    int lineno = 0;
    int declared_nodes = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("line " + std::to_string(lineno) + ": malformed section");
            section = line.substr(1, line.size() - 2);
            continue;
        }
        if (section == "graph") {
            std::istringstream ls(line);
            std::string word;
            ls >> word;
            if (word == "marginal") {
                std::string idx_s, path;
                ls >> idx_s;
                std::getline(ls, path);
                path = detail::trim(path);
                int idx = detail::parse_int(idx_s, "marginal index");
                if (idx < 1 || path.empty())
                    throw ParseError("line " + std::to_string(lineno) + ": marginal needs index and path");
                if (idx > declared_nodes) declared_nodes = idx;
                if (static_cast<int>(cfg.graph.marginal_paths.size()) < idx) cfg.graph.marginal_paths.resize(idx);
                cfg.graph.marginal_paths[idx - 1] = path;
            } else if (word == "edge") {
                std::string a_s, b_s, w_s;
                ls >> a_s >> b_s >> w_s;
                if (w_s.empty()) throw ParseError("line " + std::to_string(lineno) + ": edge needs 'edge i j w'");
                int a = detail::parse_int(a_s, "edge endpoint");
                int b = detail::parse_int(b_s, "edge endpoint");
                double w = detail::parse_double(w_s, "edge weight");
                if (a == b) throw ParseError("line " + std::to_string(lineno) + ": self-loop");
                if (a < 1 || b < 1) throw ParseError("line " + std::to_string(lineno) + ": node indices are 1-based");
                CostEdge e;
                e.a = std::min(a, b) - 1;
                e.b = std::max(a, b) - 1;
                e.cost = PairwiseCost(w);
                cfg.graph.edges.push_back(e);
                declared_nodes = std::max(declared_nodes, std::max(a, b));
            } else {
                throw ParseError("line " + std::to_string(lineno) + ": unknown graph directive '" + word + "'");
            }
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (section == "solver") {
            if (key == "floor")
                cfg.floor = detail::parse_double(value, key);
            else
                apply_solver_key(cfg.solver, key, value);
        } else if (section == "output") {
            if (key == "history")
                cfg.history_path = value;
            else if (key == "potentials_prefix")
                cfg.potentials_prefix = value;
            else if (key == "barycenter")
                cfg.barycenter_path = value;
            else
                throw ParseError("unknown output key '" + key + "'");
        } else {
            throw ParseError("line " + std::to_string(lineno) + ": directive outside a known section");
        }
    }
    int n = static_cast<int>(cfg.graph.marginal_paths.size());
    if (n < 2) throw ParseError("config declares fewer than 2 marginals");
    for (int i = 0; i < n; ++i)
        if (cfg.graph.marginal_paths[i].empty())
            throw ParseError("marginal " + std::to_string(i + 1) + " has no image path");
    if (cfg.graph.edges.empty()) throw ParseError("config declares no edges");
    return cfg;
}

inline SolveFileConfig load_solve_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    return parse_solve_config(in);
}

}  // namespace mmot
