#pragma once

#include <cmath>
#include <vector>

#include "mmot/grid.hpp"

// Procedural grayscale shapes for experiments and demos: four distinct
// silhouettes (cross, heart, tooth, bird) plus simple primitives. All
// functions return raw intensity images; feed them through
// density_from_image to obtain probability densities.

namespace mmot::shapes {

namespace detail {
template <typename F>
std::vector<double> rasterize(const Grid2D& g, F&& inside) {
    std::vector<double> px(g.size(), 0.0);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            if (inside(g.x_center(ix), g.y_center(iy))) px[g.index(ix, iy)] = 1.0;
    return px;
}
}  // namespace detail

inline std::vector<double> disk(const Grid2D& g, double cx, double cy, double r) {
    return detail::rasterize(g, [&](double x, double y) {
        double dx = x - cx, dy = y - cy;
        return dx * dx + dy * dy <= r * r;
    });
}

inline std::vector<double> square(const Grid2D& g, double cx, double cy, double half) {
    return detail::rasterize(
        g, [&](double x, double y) { return std::abs(x - cx) <= half && std::abs(y - cy) <= half; });
}

inline std::vector<double> annulus(const Grid2D& g, double cx, double cy, double r0, double r1) {
    return detail::rasterize(g, [&](double x, double y) {
        double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        return d2 >= r0 * r0 && d2 <= r1 * r1;
    });
}

inline std::vector<double> gaussian(const Grid2D& g, double cx, double cy, double sigma) {
    std::vector<double> px(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double dx = g.x_center(ix) - cx, dy = g.y_center(iy) - cy;
            px[g.index(ix, iy)] = std::exp(-0.5 * (dx * dx + dy * dy) / (sigma * sigma));
        }
    return px;
}

/// Upright cross (plus sign), the "redcross" stand-in.
inline std::vector<double> cross(const Grid2D& g, double cx = 0.5, double cy = 0.5, double arm = 0.3,
                                 double thick = 0.1) {
    return detail::rasterize(g, [&](double x, double y) {
        double dx = std::abs(x - cx), dy = std::abs(y - cy);
        return (dx <= thick && dy <= arm) || (dy <= thick && dx <= arm);
    });
}

/// Classic implicit heart curve, scaled into the unit square.
inline std::vector<double> heart(const Grid2D& g, double cx = 0.5, double cy = 0.5, double scale = 0.55) {
    return detail::rasterize(g, [&](double x, double y) {
        double u = (x - cx) / scale * 2.6;
        double v = (y - cy) / scale * 2.6 + 0.3;
        double a = u * u + v * v - 1.0;
        return a * a * a - u * u * v * v * v <= 0.0;
    });
}

/// Molar-like silhouette: a rounded crown with two root notches.
inline std::vector<double> tooth(const Grid2D& g, double cx = 0.5, double cy = 0.5, double scale = 0.3) {
    return detail::rasterize(g, [&](double x, double y) {
        double u = (x - cx) / scale;
        double v = (y - cy) / scale;
        double body = std::pow(std::abs(u), 2.5) + std::pow(std::abs(v), 2.5);
        if (body > 1.0) return false;
        // carve a notch between the two roots at the bottom
        if (v > 0.15 && std::abs(u) < 0.28 * (v - 0.15) / 0.85 + 0.05) return false;
        return true;
    });
}

/// Duck-ish bird: body ellipse, head disk and a short beak.
inline std::vector<double> bird(const Grid2D& g, double cx = 0.5, double cy = 0.5, double scale = 0.3) {
    return detail::rasterize(g, [&](double x, double y) {
        double u = (x - cx) / scale;
        double v = (y - cy) / scale;
        double body = (u + 0.15) * (u + 0.15) / 0.81 + (v - 0.25) * (v - 0.25) / 0.36;
        double head = (u - 0.45) * (u - 0.45) + (v + 0.5) * (v + 0.5);
        bool beak = u > 0.75 && u < 1.05 && std::abs(v + 0.5) < 0.12 * (1.05 - u) / 0.3;
        return body <= 1.0 || head <= 0.33 * 0.33 || beak;
    });
}

}  // namespace mmot::shapes
