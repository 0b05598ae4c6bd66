#pragma once

#include <random>

#include "cdis/linalg.hpp"

namespace testutil {

using cdis::Complex;
using cdis::Matrix;

inline Complex rand_complex(std::mt19937& g) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    return {d(g), d(g)};
}

inline Matrix rand_matrix(std::mt19937& g, int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rand_complex(g);
    return m;
}

/// Diagonally dominant hence comfortably invertible.
inline Matrix rand_well_conditioned(std::mt19937& g, int n) {
    Matrix m = rand_matrix(g, n, n);
    for (int i = 0; i < n; ++i) m(i, i) += 3.0;
    return m;
}

/// Cofactor-expansion determinant; exponential but fine at the sizes used
/// in tests. Kept deliberately independent of the elimination-based path.
inline Complex naive_det(const Matrix& m) {
    const int n = m.dim();
    if (n == 1) return m(0, 0);
    Complex acc = 0.0;
    double sign = 1.0;
    for (int k = 0; k < n; ++k) {
        Matrix minor(n - 1, n - 1);
        for (int i = 1; i < n; ++i) {
            int cc = 0;
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                minor(i - 1, cc++) = m(i, j);
            }
        }
        acc += sign * m(0, k) * naive_det(minor);
        sign = -sign;
    }
    return acc;
}

inline double dist(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

}  // namespace testutil
