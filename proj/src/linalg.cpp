#include "cdis/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cdis {

namespace {

constexpr double kPivotRel = 1e-12;

}  // namespace

Matrix diag_exp(const std::vector<Complex>& d) {
    Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) {
        if (!is_finite(d[i])) throw std::invalid_argument("diag_exp: non-finite entry");
        m(static_cast<int>(i), static_cast<int>(i)) = std::exp(d[i]);
    }
    return m;
}

Matrix solve(const Matrix& a, const Matrix& b) {
    if (!a.is_square()) throw std::invalid_argument("solve: coefficient matrix not square");
    if (a.rows() != b.rows())
        throw std::invalid_argument("solve: right-hand side has " + std::to_string(b.rows()) +
                                    " rows, expected " + std::to_string(a.rows()));
    const int n = a.rows();
    const int m = b.cols();
    const double threshold = kPivotRel * a.max_abs();

    Matrix u = a;
    Matrix x = b;
    double smallest_pivot = std::numeric_limits<double>::infinity();

    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(u(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(u(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        smallest_pivot = std::min(smallest_pivot, best);
        if (best <= threshold)
            throw SingularMatrixError("solve: matrix singular to tolerance at column " +
                                          std::to_string(k),
                                      best);
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(u(k, j), u(piv, j));
            for (int j = 0; j < m; ++j) std::swap(x(k, j), x(piv, j));
        }
        const Complex d = u(k, k);
        for (int i = k + 1; i < n; ++i) {
            const Complex f = u(i, k) / d;
            if (f == Complex(0.0)) continue;
            u(i, k) = 0.0;
            for (int j = k + 1; j < n; ++j) u(i, j) -= f * u(k, j);
            for (int j = 0; j < m; ++j) x(i, j) -= f * x(k, j);
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        for (int j = 0; j < m; ++j) {
            Complex s = x(k, j);
            for (int i = k + 1; i < n; ++i) s -= u(k, i) * x(i, j);
            x(k, j) = s / u(k, k);
        }
    }
    return x;
}

Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.dim())); }

Complex determinant(const Matrix& a) {
    const int n = a.dim();
    if (n == 0) return 1.0;
    Matrix u = a;
    Complex det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(u(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(u(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(u(k, j), u(piv, j));
            det = -det;
        }
        det *= u(k, k);
        for (int i = k + 1; i < n; ++i) {
            const Complex f = u(i, k) / u(k, k);
            for (int j = k + 1; j < n; ++j) u(i, j) -= f * u(k, j);
        }
    }
    return det;
}

}  // namespace cdis
