#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mmot/errors.hpp"

namespace mmot {

/// Uniform cell-centered grid on the unit square [0,1]^2.
///
/// Cell (ix, iy) has its center at ((ix+1/2)/nx, (iy+1/2)/ny) and area
/// 1/(nx*ny). Values attached to a grid are stored row-major, iy slowest:
/// linear index iy*nx + ix.
struct Grid2D {
    int nx = 0;
    int ny = 0;

    Grid2D() = default;
    Grid2D(int nx_, int ny_) : nx(nx_), ny(ny_) {
        if (nx < 2 || ny < 2) throw Error("grid needs at least 2 cells per axis");
    }

    int size() const { return nx * ny; }
    double cell_area() const { return 1.0 / (static_cast<double>(nx) * ny); }
    double x_center(int ix) const { return (ix + 0.5) / nx; }
    double y_center(int iy) const { return (iy + 0.5) / ny; }
    int index(int ix, int iy) const { return iy * nx + ix; }

    friend bool operator==(const Grid2D& a, const Grid2D& b) { return a.nx == b.nx && a.ny == b.ny; }
    friend bool operator!=(const Grid2D& a, const Grid2D& b) { return !(a == b); }
};

namespace detail {

/// Compensated (Kahan) summation. Needed so that unit-mass and zero-mean
/// checks hold to 1e-12 even on 1024^2 grids.
inline double kahan_sum(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

template <typename F>
inline double kahan_sum(std::size_t n, F&& term) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double y = term(i) - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace detail

/// A real-valued field sampled at cell centers (dual potential or net potential).
struct PotentialField {
    Grid2D grid;
    std::vector<double> values;

    PotentialField() = default;
    explicit PotentialField(const Grid2D& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    PotentialField(const Grid2D& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != g.size()) throw Error("field size does not match grid");
    }

    double& operator()(int ix, int iy) { return values[grid.index(ix, iy)]; }
    double operator()(int ix, int iy) const { return values[grid.index(ix, iy)]; }

    PotentialField& operator+=(const PotentialField& o) {
        if (grid != o.grid) throw GridMismatch();
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
        return *this;
    }
    PotentialField& operator-=(const PotentialField& o) {
        if (grid != o.grid) throw GridMismatch();
        for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
        return *this;
    }
    PotentialField& operator*=(double s) {
        for (double& v : values) v *= s;
        return *this;
    }
};

/// Discretized probability density with respect to Lebesgue measure:
/// values >= 0 and cell_area * sum(values) == 1 up to 1e-12.
struct DensityField {
    Grid2D grid;
    std::vector<double> values;

    DensityField() = default;
    explicit DensityField(const Grid2D& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    DensityField(const Grid2D& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != g.size()) throw Error("field size does not match grid");
    }

    double& operator()(int ix, int iy) { return values[grid.index(ix, iy)]; }
    double operator()(int ix, int iy) const { return values[grid.index(ix, iy)]; }

    double mass() const { return grid.cell_area() * detail::kahan_sum(values); }

    /// Scales values in place so mass() == 1. Throws AllZeroInput on zero mass.
    void normalize() {
        double m = mass();
        if (!(m > 0.0)) throw AllZeroInput();
        double inv = 1.0 / m;
        for (double& v : values) v *= inv;
    }
};

/// Builds a density from raw image intensities. A relative floor
/// (floor * max intensity) is added to every pixel first; the paper-side
/// analysis assumes strictly positive densities while typical test images
/// have empty regions, so callers ingesting images normally pass a small
/// positive floor (the CLI default is 1e-6).
inline DensityField density_from_image(const Grid2D& grid, const std::vector<double>& pixels, double floor) {
    if (static_cast<int>(pixels.size()) != grid.size()) throw Error("pixel count does not match grid");
    if (floor < 0.0) throw Error("floor must be nonnegative");
    double maxp = 0.0;
    for (double p : pixels) {
        if (p < 0.0) throw Error("negative pixel intensity");
        maxp = std::max(maxp, p);
    }
    DensityField out(grid);
    double add = floor * maxp;
    for (std::size_t i = 0; i < pixels.size(); ++i) out.values[i] = pixels[i] + add;
    out.normalize();  // throws AllZeroInput on an all-zero image
    return out;
}

/// Discrete integral of f against mu: cell_area * sum f*mu.
inline double integrate_against(const PotentialField& f, const DensityField& mu) {
    if (f.grid != mu.grid) throw GridMismatch();
    const auto& fv = f.values;
    const auto& mv = mu.values;
    double s = detail::kahan_sum(fv.size(), [&](std::size_t i) { return fv[i] * mv[i]; });
    return f.grid.cell_area() * s;
}

/// L1 distance between two densities, in [0, 2] for probability measures.
inline double l1_distance(const DensityField& a, const DensityField& b) {
    if (a.grid != b.grid) throw GridMismatch();
    double s = detail::kahan_sum(a.values.size(),
                                 [&](std::size_t i) { return std::abs(a.values[i] - b.values[i]); });
    return a.grid.cell_area() * s;
}

}  // namespace mmot
