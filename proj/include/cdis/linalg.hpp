#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdis {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Thrown when elimination meets a pivot below the scale-aware threshold
/// (1e-12 times the largest initial entry magnitude). Carries the offending
/// pivot magnitude so callers can report how close to singular the input was.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& context, double smallest_pivot)
        : std::runtime_error(context + " (smallest pivot magnitude " +
                             std::to_string(smallest_pivot) + ")"),
          smallest_pivot_(smallest_pivot) {}

    double smallest_pivot() const { return smallest_pivot_; }

private:
    double smallest_pivot_;
};

/// Dense complex matrix, row-major. Dimensions in this project are tiny
/// (block math tops out around 12x12), so everything is plain loops over
/// contiguous storage. Rectangular shapes are allowed; operations that only
/// make sense on square input check for it.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}

    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
    }

    Matrix(int rows, int cols, std::vector<Complex> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (rows < 1 || cols < 1) throw std::invalid_argument("Matrix: dimension must be >= 1");
        if (data_.size() != static_cast<size_t>(rows) * cols)
            throw std::invalid_argument("Matrix: entry count does not match shape");
        for (const Complex& z : data_)
            if (!is_finite(z)) throw std::invalid_argument("Matrix: non-finite entry");
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(const std::vector<Complex>& d) {
        Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (size_t i = 0; i < d.size(); ++i) {
            if (!is_finite(d[i])) throw std::invalid_argument("diagonal: non-finite entry");
            m(static_cast<int>(i), static_cast<int>(i)) = d[i];
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    /// Square dimension; throws on rectangular input.
    int dim() const {
        if (!is_square()) throw std::invalid_argument("dim(): matrix not square");
        return rows_;
    }

    Complex& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const Complex& operator()(int i, int j) const {
        return data_[static_cast<size_t>(i) * cols_ + j];
    }

    Matrix operator+(const Matrix& o) const {
        require_same_shape(o, "operator+");
        Matrix r(rows_, cols_);
        for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] + o.data_[k];
        return r;
    }

    Matrix operator-(const Matrix& o) const {
        require_same_shape(o, "operator-");
        Matrix r(rows_, cols_);
        for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] - o.data_[k];
        return r;
    }

    Matrix operator-() const {
        Matrix r(rows_, cols_);
        for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = -data_[k];
        return r;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_)
            throw std::invalid_argument("operator*: dimension mismatch (" + shape_str() +
                                        " times " + o.shape_str() + ")");
        Matrix r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const Complex aik = (*this)(i, k);
                if (aik == Complex(0.0)) continue;
                for (int j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
            }
        return r;
    }

    Matrix operator*(Complex s) const {
        Matrix r(rows_, cols_);
        for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] * s;
        return r;
    }

    /// Conjugate transpose.
    Matrix dagger() const {
        Matrix r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    Complex trace() const {
        Complex t = 0.0;
        for (int i = 0; i < dim(); ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const Complex& z : data_) s += std::norm(z);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const Complex& z : data_) m = std::max(m, std::abs(z));
        return m;
    }

    bool all_finite() const {
        for (const Complex& z : data_)
            if (!is_finite(z)) return false;
        return true;
    }

    std::string shape_str() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

private:
    void require_same_shape(const Matrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string(op) + ": shape mismatch (" + shape_str() +
                                        " vs " + o.shape_str() + ")");
    }

    int rows_;
    int cols_;
    std::vector<Complex> data_;
};

inline Matrix operator*(Complex s, const Matrix& m) { return m * s; }
inline Matrix operator*(double s, const Matrix& m) { return m * Complex(s); }

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

/// Diagonal matrix with entries exp(d_k). The only matrix exponential this
/// project needs: every seed field is simultaneously diagonal.
Matrix diag_exp(const std::vector<Complex>& d);

/// Solves a x = b by Gaussian elimination with partial pivoting. b may have
/// any number of columns. A pivot counts as singular when its magnitude falls
/// below 1e-12 times the largest entry magnitude of the initial a.
Matrix solve(const Matrix& a, const Matrix& b);

Matrix inverse(const Matrix& a);

Complex determinant(const Matrix& a);

}  // namespace cdis
