#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mmot/errors.hpp"
#include "mmot/grid.hpp"

namespace mmot {

/// Quadratic pairwise cost (w/2)|x-y|^2, evaluated in one fixed expression.
/// Both the fast transforms and any brute-force scan must call this so that
/// agreement between them is exact in floating point, not just analytic.
inline double pair_cost(double w, double x1, double y1, double x2, double y2) {
    double dx = x1 - x2;
    double dy = y1 - y2;
    return 0.5 * w * (dx * dx + dy * dy);
}

/// One term of the discrete Legendre maximum, in the canonical expression.
inline double legendre_term(double xj, double yj, double qx, double qy, double phi) {
    return xj * qx + (yj * qy - phi);
}

namespace detail {

/// Linear-time discrete Legendre argmax along one axis.
///
/// For ascending queries s, finds argmax_j (s*pos[j] - val[j]) over strictly
/// increasing positions. Builds the lower convex hull of (pos, val) — only
/// hull vertices can attain the maximum — then walks it once; the walk
/// pointer only moves forward because the maximizer index is nondecreasing
/// in s. Ties keep the earliest hull vertex.
inline void conjugate_argmax_1d(const double* pos, const double* val, int n, const double* queries, int q,
                                int* out, std::vector<int>& hull) {
    hull.clear();
    for (int j = 0; j < n; ++j) {
        while (hull.size() >= 2) {
            int a = hull[hull.size() - 2];
            int b = hull.back();
            // keep b only if it lies strictly below the chord a--j
            if ((val[b] - val[a]) * (pos[j] - pos[a]) < (val[j] - val[a]) * (pos[b] - pos[a])) break;
            hull.pop_back();
        }
        hull.push_back(j);
    }
    const int hn = static_cast<int>(hull.size());
    int t = 0;
    for (int k = 0; k < q; ++k) {
        double s = queries[k];
        while (t + 1 < hn) {
            int cur = hull[t];
            int nxt = hull[t + 1];
            if (s * pos[nxt] - val[nxt] > s * pos[cur] - val[cur])
                ++t;
            else
                break;
        }
        out[k] = hull[t];
    }
}

struct NestedConjugate {
    std::vector<int> arg_x;   // per output cell: maximizing ix
    std::vector<int> arg_y;   // per output cell: maximizing iy (within column arg_x)
};

/// Runs the two nested 1D passes shared by the Legendre and c-transforms:
/// argmax over (ix, iy) of qx*xs[ix] + qy*ys[iy] - phi(ix, iy) for every
/// query pair, with queries ascending along both axes.
inline NestedConjugate nested_conjugate_argmax(const Grid2D& g, const std::vector<double>& phi,
                                               const std::vector<double>& qx, const std::vector<double>& qy) {
    const int nx = g.nx, ny = g.ny;
    const int qnx = static_cast<int>(qx.size()), qny = static_cast<int>(qy.size());
    std::vector<double> xs(nx), ys(ny);
    for (int ix = 0; ix < nx; ++ix) xs[ix] = g.x_center(ix);
    for (int iy = 0; iy < ny; ++iy) ys[iy] = g.y_center(iy);

    // pass 1: conjugate along y within each column
    std::vector<double> col(ny), bval(static_cast<std::size_t>(qny) * nx);
    std::vector<int> barg(static_cast<std::size_t>(qny) * nx), acol(qny), hull;
    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) col[iy] = phi[g.index(ix, iy)];
        conjugate_argmax_1d(ys.data(), col.data(), ny, qy.data(), qny, acol.data(), hull);
        for (int ky = 0; ky < qny; ++ky) {
            int j2 = acol[ky];
            barg[static_cast<std::size_t>(ky) * nx + ix] = j2;
            bval[static_cast<std::size_t>(ky) * nx + ix] = qy[ky] * ys[j2] - col[j2];
        }
    }

    // pass 2: conjugate along x within each partial-result row
    NestedConjugate out;
    out.arg_x.resize(static_cast<std::size_t>(qny) * qnx);
    out.arg_y.resize(static_cast<std::size_t>(qny) * qnx);
    std::vector<double> row(nx);
    std::vector<int> arow(qnx);
    for (int ky = 0; ky < qny; ++ky) {
        const double* b = &bval[static_cast<std::size_t>(ky) * nx];
        for (int ix = 0; ix < nx; ++ix) row[ix] = -b[ix];
        conjugate_argmax_1d(xs.data(), row.data(), nx, qx.data(), qnx, arow.data(), hull);
        for (int kx = 0; kx < qnx; ++kx) {
            int j1 = arow[kx];
            out.arg_x[static_cast<std::size_t>(ky) * qnx + kx] = j1;
            out.arg_y[static_cast<std::size_t>(ky) * qnx + kx] = barg[static_cast<std::size_t>(ky) * nx + j1];
        }
    }
    return out;
}

}  // namespace detail

/// Discrete Legendre-Fenchel transform phi*(y) = max_x (x.y - phi(x)), the
/// max running over grid cell centers and y sampled at the same centers.
/// Exact: evaluates the true discrete maximizer found by the hull passes.
inline PotentialField legendre_transform(const PotentialField& phi) {
    const Grid2D& g = phi.grid;
    std::vector<double> qx(g.nx), qy(g.ny);
    for (int ix = 0; ix < g.nx; ++ix) qx[ix] = g.x_center(ix);
    for (int iy = 0; iy < g.ny; ++iy) qy[iy] = g.y_center(iy);
    auto args = detail::nested_conjugate_argmax(g, phi.values, qx, qy);
    PotentialField out(g);
    for (int ky = 0; ky < g.ny; ++ky)
        for (int kx = 0; kx < g.nx; ++kx) {
            std::size_t o = static_cast<std::size_t>(g.index(kx, ky));
            int j1 = args.arg_x[o], j2 = args.arg_y[o];
            out.values[o] = legendre_term(g.x_center(j1), g.y_center(j2), qx[kx], qy[ky],
                                          phi.values[g.index(j1, j2)]);
        }
    return out;
}

struct CTransformResult {
    PotentialField value;
    /// Per output cell, the linear index of the minimizing input cell. This
    /// is the discrete pushforward map S induced by the transform.
    std::vector<std::int32_t> argmin;
};

/// c-transform f^c(y) = min_x (w/2)|x-y|^2 - f(x) for the scaled quadratic
/// cost, reduced to a Legendre transform of phi(x) = (w/2)|x|^2 - f(x) with
/// query coordinates scaled by w. The reported value re-evaluates the cost
/// expression at the found argmin, so it matches a brute-force scan exactly.
inline CTransformResult c_transform_with_map(const PotentialField& f, double w) {
    if (!(w > 0.0)) throw NonpositiveWeight();
    const Grid2D& g = f.grid;
    std::vector<double> phi(f.values.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double x = g.x_center(ix), y = g.y_center(iy);
            phi[g.index(ix, iy)] = 0.5 * w * (x * x + y * y) - f.values[g.index(ix, iy)];
        }
    std::vector<double> qx(g.nx), qy(g.ny);
    for (int ix = 0; ix < g.nx; ++ix) qx[ix] = w * g.x_center(ix);
    for (int iy = 0; iy < g.ny; ++iy) qy[iy] = w * g.y_center(iy);
    auto args = detail::nested_conjugate_argmax(g, phi, qx, qy);

    CTransformResult res{PotentialField(g), std::vector<std::int32_t>(f.values.size())};
    for (int ky = 0; ky < g.ny; ++ky)
        for (int kx = 0; kx < g.nx; ++kx) {
            std::size_t o = static_cast<std::size_t>(g.index(kx, ky));
            int j1 = args.arg_x[o], j2 = args.arg_y[o];
            int src = g.index(j1, j2);
            res.value.values[o] =
                pair_cost(w, g.x_center(j1), g.y_center(j2), g.x_center(kx), g.y_center(ky)) - f.values[src];
            res.argmin[o] = static_cast<std::int32_t>(src);
        }
    return res;
}

inline PotentialField c_transform(const PotentialField& f, double w) {
    return c_transform_with_map(f, w).value;
}

/// f^{cc}: applying the c-transform twice tightens f toward c-concavity;
/// f^{cc} >= f with equality exactly when f is c-concave.
inline PotentialField double_c_transform_tightening(const PotentialField& f, double w) {
    return c_transform(c_transform(f, w), w);
}

struct Vec2Field {
    Grid2D grid;
    std::vector<double> x;
    std::vector<double> y;
};

/// Finite-difference gradient: centered in the interior, one-sided at the
/// boundary cells, spacing 1/nx and 1/ny.
inline Vec2Field gradient_field(const PotentialField& f) {
    const Grid2D& g = f.grid;
    Vec2Field out{g, std::vector<double>(f.values.size()), std::vector<double>(f.values.size())};
    const double* v = f.values.data();
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            int i = g.index(ix, iy);
            double gx, gy;
            if (ix == 0)
                gx = (v[g.index(1, iy)] - v[i]) * g.nx;
            else if (ix == g.nx - 1)
                gx = (v[i] - v[g.index(g.nx - 2, iy)]) * g.nx;
            else
                gx = (v[g.index(ix + 1, iy)] - v[g.index(ix - 1, iy)]) * (0.5 * g.nx);
            if (iy == 0)
                gy = (v[g.index(ix, 1)] - v[i]) * g.ny;
            else if (iy == g.ny - 1)
                gy = (v[i] - v[g.index(ix, g.ny - 2)]) * g.ny;
            else
                gy = (v[g.index(ix, iy + 1)] - v[g.index(ix, iy - 1)]) * (0.5 * g.ny);
            out.x[i] = gx;
            out.y[i] = gy;
        }
    }
    return out;
}

enum class Deposit { bilinear, nearest };

/// Pushforward of mu under S(x) = x - grad(f')(x)/w. Each cell's mass moves
/// to S(x), clamped into the domain, and is deposited on the surrounding
/// cell centers (bilinearly by default). Mass is conserved by construction.
inline DensityField pushforward(const PotentialField& f_prime, const DensityField& mu, double w,
                                Deposit mode = Deposit::bilinear) {
    if (!(w > 0.0)) throw NonpositiveWeight();
    if (f_prime.grid != mu.grid) throw GridMismatch();
    const Grid2D& g = mu.grid;
    Vec2Field grad = gradient_field(f_prime);
    DensityField out(g);
    const double inv_w = 1.0 / w;
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            int i = g.index(ix, iy);
            double m = mu.values[i];
            if (m == 0.0) continue;
            double sx = g.x_center(ix) - grad.x[i] * inv_w;
            double sy = g.y_center(iy) - grad.y[i] * inv_w;
            // continuous cell coordinates, clamped so boundary images stay
            // on the outermost cell centers
            double u = sx * g.nx - 0.5;
            double v = sy * g.ny - 0.5;
            u = u < 0.0 ? 0.0 : (u > g.nx - 1 ? g.nx - 1 : u);
            v = v < 0.0 ? 0.0 : (v > g.ny - 1 ? g.ny - 1 : v);
            if (mode == Deposit::nearest) {
                int tx = static_cast<int>(u + 0.5);
                int ty = static_cast<int>(v + 0.5);
                out.values[g.index(tx, ty)] += m;
                continue;
            }
            int i0 = static_cast<int>(u);
            int j0 = static_cast<int>(v);
            if (i0 > g.nx - 2) i0 = g.nx - 2;
            if (j0 > g.ny - 2) j0 = g.ny - 2;
            double fx = u - i0;
            double fy = v - j0;
            out.values[g.index(i0, j0)] += m * (1.0 - fx) * (1.0 - fy);
            out.values[g.index(i0 + 1, j0)] += m * fx * (1.0 - fy);
            out.values[g.index(i0, j0 + 1)] += m * (1.0 - fx) * fy;
            out.values[g.index(i0 + 1, j0 + 1)] += m * fx * fy;
        }
    }
    return out;
}

/// Pushforward along the exact discrete minimizer map of a c-transform:
/// cell y of mu deposits all of its mass on argmin[y]. This is the discrete
/// S map the transform actually selected, used by derivative checks.
inline DensityField pushforward_argmin(const std::vector<std::int32_t>& argmin, const DensityField& mu) {
    if (argmin.size() != mu.values.size()) throw GridMismatch("argmin map size mismatch");
    DensityField out(mu.grid);
    for (std::size_t i = 0; i < argmin.size(); ++i) out.values[argmin[i]] += mu.values[i];
    return out;
}

}  // namespace mmot
