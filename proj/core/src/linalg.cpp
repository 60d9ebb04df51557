#include "lyapcert/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace lyapcert {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec matvec(const Matrix& m, std::span<const double> x) {
    Vec y(static_cast<std::size_t>(m.rows), 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

bool is_symmetric(const Matrix& m, double tol) {
    if (m.rows != m.cols) return false;
    for (int i = 0; i < m.rows; ++i)
        for (int j = i + 1; j < m.cols; ++j)
            if (std::fabs(m(i, j) - m(j, i)) > tol * (1.0 + std::fabs(m(i, j)))) return false;
    return true;
}

namespace {

double offdiag_norm(const Matrix& m) {
    double s = 0.0;
    for (int i = 0; i < m.rows; ++i)
        for (int j = i + 1; j < m.cols; ++j) s += m(i, j) * m(i, j);
    return std::sqrt(2.0 * s);
}

} // namespace

std::vector<double> jacobi_eigenvalues(Matrix m, int max_sweeps) {
    if (m.rows != m.cols) {
        throw Error("jacobi_eigenvalues requires a square matrix");
    }
    const int n = m.rows;
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::fabs(m(i, i)));
    const double stop = 1e-14 * std::max(1.0, scale);

    int sweep = 0;
    while (offdiag_norm(m) > stop) {
        if (++sweep > max_sweeps) {
            throw ConvergenceError("Jacobi eigensolver did not converge within " +
                                   std::to_string(max_sweeps) + " sweeps");
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = m(p, p);
                const double aqq = m(q, q);
                m(p, p) = app - t * apq;
                m(q, q) = aqq + t * apq;
                m(p, q) = 0.0;
                m(q, p) = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = m(r, p);
                    const double arq = m(r, q);
                    m(r, p) = arp - s * (arq + tau * arp);
                    m(p, r) = m(r, p);
                    m(r, q) = arq + s * (arp - tau * arq);
                    m(q, r) = m(r, q);
                }
            }
        }
    }

    std::vector<double> eig(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eig[i] = m(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

Vec solve_linear(Matrix a, Vec b) {
    if (a.rows != a.cols || static_cast<int>(b.size()) != a.rows) {
        throw Error("solve_linear: dimension mismatch");
    }
    const int n = a.rows;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
        if (std::fabs(a(piv, k)) < 1e-300) {
            throw ConvergenceError("singular matrix in linear solve");
        }
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    Vec x(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

} // namespace lyapcert
