#pragma once

#include <mutex>
#include <vector>

#include <fftw3.h>

#include "mmot/errors.hpp"
#include "mmot/grid.hpp"

namespace mmot {

namespace detail {
// FFTW plan creation/destruction is not thread-safe; execution is.
inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// Applies (-Laplacian)^{-1} with homogeneous Neumann conditions on the
/// zero-mean subspace, by diagonalizing the 5-point stencil in the DCT-II
/// basis: forward cosine transform, divide mode (p,q) != (0,0) by
///   lambda_pq = (2 - 2cos(pi p/nx)) nx^2 + (2 - 2cos(pi q/ny)) ny^2,
/// zero the constant mode, inverse transform. The input mean is projected
/// out by the zeroed mode, and the output has mean 0.
///
/// One instance owns its FFTW plans and scratch buffer, so a solver must not
/// be shared across threads; independent instances are safe concurrently.
class NeumannPoisson {
public:
    explicit NeumannPoisson(const Grid2D& grid) : grid_(grid), work_(grid.size()), eig_x_(grid.nx), eig_y_(grid.ny) {
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        // FFTW's first dimension is the slowest varying (rows, i.e. y).
        forward_ = fftw_plan_r2r_2d(grid_.ny, grid_.nx, work_.data(), work_.data(), FFTW_REDFT10, FFTW_REDFT10,
                                    FFTW_ESTIMATE);
        inverse_ = fftw_plan_r2r_2d(grid_.ny, grid_.nx, work_.data(), work_.data(), FFTW_REDFT01, FFTW_REDFT01,
                                    FFTW_ESTIMATE);
        if (!forward_ || !inverse_) throw Error("FFTW plan creation failed");
        for (int p = 0; p < grid_.nx; ++p)
            eig_x_[p] = (2.0 - 2.0 * std::cos(M_PI * p / grid_.nx)) * grid_.nx * grid_.nx;
        for (int q = 0; q < grid_.ny; ++q)
            eig_y_[q] = (2.0 - 2.0 * std::cos(M_PI * q / grid_.ny)) * grid_.ny * grid_.ny;
    }

    ~NeumannPoisson() {
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(inverse_);
    }

    NeumannPoisson(const NeumannPoisson&) = delete;
    NeumannPoisson& operator=(const NeumannPoisson&) = delete;

    const Grid2D& grid() const { return grid_; }

    /// Solves -Laplacian(u) = rhs - mean(rhs), returns zero-mean u.
    PotentialField solve(const PotentialField& rhs) {
        if (rhs.grid != grid_) throw GridMismatch();
        PotentialField out(grid_);
        solve_raw(rhs.values.data(), out.values.data());
        return out;
    }

    void solve_raw(const double* rhs, double* u) {
        const int nx = grid_.nx, ny = grid_.ny;
        std::copy(rhs, rhs + grid_.size(), work_.begin());
        fftw_execute(forward_);
        const double norm = 1.0 / (4.0 * static_cast<double>(nx) * ny);  // REDFT10+REDFT01 scale by 4*nx*ny
        work_[0] = 0.0;
        for (int q = 0; q < ny; ++q) {
            double ey = eig_y_[q];
            double* row = work_.data() + static_cast<std::size_t>(q) * nx;
            for (int p = 0; p < nx; ++p) {
                if (p == 0 && q == 0) continue;
                row[p] *= norm / (eig_x_[p] + ey);
            }
        }
        fftw_execute(inverse_);
        std::copy(work_.begin(), work_.end(), u);
    }

private:
    Grid2D grid_;
    std::vector<double> work_;
    std::vector<double> eig_x_, eig_y_;
    fftw_plan forward_ = nullptr;
    fftw_plan inverse_ = nullptr;
};

/// One-shot convenience wrapper; prefer holding a NeumannPoisson when
/// solving repeatedly on the same grid.
inline PotentialField inverse_neumann_laplacian(const PotentialField& rhs) {
    NeumannPoisson solver(rhs.grid);
    return solver.solve(rhs);
}

/// The 5-point Neumann -Laplacian, the discrete operator the spectral solve
/// inverts. Kept next to it for roundtrip checks.
inline PotentialField apply_neumann_laplacian(const PotentialField& u) {
    const Grid2D& g = u.grid;
    PotentialField out(g);
    const double cx = static_cast<double>(g.nx) * g.nx;
    const double cy = static_cast<double>(g.ny) * g.ny;
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            double c = u(ix, iy);
            double left = ix > 0 ? u(ix - 1, iy) : c;
            double right = ix < g.nx - 1 ? u(ix + 1, iy) : c;
            double down = iy > 0 ? u(ix, iy - 1) : c;
            double up = iy < g.ny - 1 ? u(ix, iy + 1) : c;
            out(ix, iy) = cx * (2.0 * c - left - right) + cy * (2.0 * c - down - up);
        }
    }
    return out;
}

}  // namespace mmot
