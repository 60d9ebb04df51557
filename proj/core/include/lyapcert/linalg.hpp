#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "lyapcert/errors.hpp"

namespace lyapcert {

using Vec = std::vector<double>;

/// Dense row-major matrix sized for small dynamical systems.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    [[nodiscard]] Matrix transposed() const {
        Matrix t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    [[nodiscard]] bool all_finite() const {
        for (double v : a)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

[[nodiscard]] double norm2(std::span<const double> v);
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);

/// y = M x
Vec matvec(const Matrix& m, std::span<const double> x);

[[nodiscard]] bool is_symmetric(const Matrix& m, double tol = 1e-12);

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations, ascending.
/// Throws ConvergenceError if the off-diagonal mass has not vanished after
/// max_sweeps full sweeps.
std::vector<double> jacobi_eigenvalues(Matrix m, int max_sweeps = 100);

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Throws ConvergenceError on a (numerically) singular matrix.
Vec solve_linear(Matrix a, Vec b);

} // namespace lyapcert
