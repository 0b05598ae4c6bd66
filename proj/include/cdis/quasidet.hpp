#pragma once

#include <variant>
#include <vector>

#include "cdis/linalg.hpp"

namespace cdis {

/// One entry of a block matrix over the working ring: either a complex
/// scalar or a square complex matrix. A given BlockMatrix holds one kind
/// only; mixing is rejected rather than promoted so shape bugs surface.
using RingElement = std::variant<Complex, Matrix>;

class BlockMatrix {
public:
    /// Builds an N x N block matrix from rows of ring elements. All elements
    /// must share one kind, and matrix blocks must share one square dimension.
    explicit BlockMatrix(const std::vector<std::vector<RingElement>>& rows);

    static BlockMatrix from_scalars(const Matrix& entries);

    int size() const { return n_blocks_; }
    int block_dim() const { return block_dim_; }
    bool scalar_kind() const { return scalar_kind_; }

    /// Block at (i, j), 0-based, always represented as a matrix
    /// (1x1 for the scalar kind).
    const Matrix& block(int i, int j) const {
        return blocks_[static_cast<size_t>(i) * n_blocks_ + j];
    }

private:
    BlockMatrix() = default;

    int n_blocks_ = 0;
    int block_dim_ = 0;
    bool scalar_kind_ = true;
    std::vector<Matrix> blocks_;
};

/// Quasideterminant |X|_{ij} = x_ij - r_i^j (X^{ij})^{-1} c_j^i with i, j
/// 1-based as in the usual notation. The deleted-row/column submatrix X^{ij}
/// is flattened to one scalar matrix and solved directly. Returns a scalar
/// for scalar-kind input, a block_dim x block_dim matrix otherwise.
RingElement quasideterminant(const BlockMatrix& x, int i, int j);

/// Quasideterminant expanded about the lower-right block: D - C A^{-1} B on
/// already-flattened matrices. Shapes: A is m x m, B is m x d, C is d x m,
/// D is d x d.
Matrix block_quasidet(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d);

/// Commutative-entry ratio form: |X|_{ij} = (-1)^{i+j} det X / det X^{ij}.
/// Scalar-kind input only.
Complex commutative_ratio(const BlockMatrix& x, int i, int j);

}  // namespace cdis
