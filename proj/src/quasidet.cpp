#include "cdis/quasidet.hpp"

#include <string>

namespace cdis {

namespace {

Matrix as_block(const RingElement& e) {
    if (std::holds_alternative<Complex>(e)) {
        Matrix m(1, 1);
        m(0, 0) = std::get<Complex>(e);
        return m;
    }
    return std::get<Matrix>(e);
}

void check_index(const BlockMatrix& x, int i, int j) {
    if (i < 1 || i > x.size() || j < 1 || j > x.size())
        throw std::invalid_argument("quasideterminant: expansion index (" + std::to_string(i) +
                                    "," + std::to_string(j) + ") out of range for N=" +
                                    std::to_string(x.size()));
}

}  // namespace

BlockMatrix BlockMatrix::from_scalars(const Matrix& entries) {
    std::vector<std::vector<RingElement>> rows(entries.dim());
    for (int i = 0; i < entries.dim(); ++i)
        for (int j = 0; j < entries.dim(); ++j) rows[i].emplace_back(entries(i, j));
    return BlockMatrix(rows);
}

BlockMatrix::BlockMatrix(const std::vector<std::vector<RingElement>>& rows) {
    n_blocks_ = static_cast<int>(rows.size());
    if (n_blocks_ < 1) throw std::invalid_argument("BlockMatrix: empty");
    scalar_kind_ = std::holds_alternative<Complex>(rows[0][0]);
    block_dim_ = scalar_kind_ ? 1 : std::get<Matrix>(rows[0][0]).dim();
    blocks_.reserve(static_cast<size_t>(n_blocks_) * n_blocks_);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != n_blocks_)
            throw std::invalid_argument("BlockMatrix: not square");
        for (const RingElement& e : row) {
            if (std::holds_alternative<Complex>(e) != scalar_kind_)
                throw std::invalid_argument("BlockMatrix: mixed scalar and matrix blocks");
            Matrix b = as_block(e);
            if (!b.is_square() || b.dim() != block_dim_)
                throw std::invalid_argument("BlockMatrix: block dimension mismatch (" +
                                            b.shape_str() + " vs " +
                                            std::to_string(block_dim_) + ")");
            if (!b.all_finite()) throw std::invalid_argument("BlockMatrix: non-finite block");
            blocks_.push_back(std::move(b));
        }
    }
}

RingElement quasideterminant(const BlockMatrix& x, int i, int j) {
    check_index(x, i, j);
    const int nb = x.size();
    const int d = x.block_dim();
    const int i0 = i - 1;
    const int j0 = j - 1;

    if (nb == 1) {
        const Matrix& only = x.block(0, 0);
        return x.scalar_kind() ? RingElement(only(0, 0)) : RingElement(only);
    }

    // Flatten X^{ij} (block rows != i, block cols != j) into one scalar matrix.
    std::vector<int> rmap, cmap;
    for (int r = 0; r < nb; ++r)
        if (r != i0) rmap.push_back(r);
    for (int c = 0; c < nb; ++c)
        if (c != j0) cmap.push_back(c);

    const int m = (nb - 1) * d;
    Matrix sub(m, m);
    for (int br = 0; br < nb - 1; ++br)
        for (int bc = 0; bc < nb - 1; ++bc) {
            const Matrix& blk = x.block(rmap[br], cmap[bc]);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) sub(br * d + a, bc * d + b) = blk(a, b);
        }

    // Column c_j^i stacked, row r_i^j laid side by side.
    Matrix col(m, d);
    for (int br = 0; br < nb - 1; ++br) {
        const Matrix& blk = x.block(rmap[br], j0);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) col(br * d + a, b) = blk(a, b);
    }
    Matrix row(d, m);
    for (int bc = 0; bc < nb - 1; ++bc) {
        const Matrix& blk = x.block(i0, cmap[bc]);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) row(a, bc * d + b) = blk(a, b);
    }

    Matrix solved;
    try {
        solved = solve(sub, col);
    } catch (const SingularMatrixError& e) {
        throw SingularMatrixError("quasideterminant: submatrix X^{" + std::to_string(i) +
                                      std::to_string(j) + "} not invertible",
                                  e.smallest_pivot());
    }
    Matrix result = x.block(i0, j0) - row * solved;
    return x.scalar_kind() ? RingElement(result(0, 0)) : RingElement(result);
}

Matrix block_quasidet(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
    if (!a.is_square() || !d.is_square())
        throw std::invalid_argument("block_quasidet: A and D must be square");
    if (b.rows() != a.rows() || b.cols() != d.cols() || c.rows() != d.rows() ||
        c.cols() != a.cols())
        throw std::invalid_argument("block_quasidet: blocks not conformable");
    return d - c * solve(a, b);
}

Complex commutative_ratio(const BlockMatrix& x, int i, int j) {
    check_index(x, i, j);
    if (!x.scalar_kind())
        throw std::invalid_argument("commutative_ratio: requires scalar entries");
    const int nb = x.size();
    Matrix full(nb, nb);
    for (int r = 0; r < nb; ++r)
        for (int c = 0; c < nb; ++c) full(r, c) = x.block(r, c)(0, 0);

    if (nb == 1) return full(0, 0);

    Matrix minor(nb - 1, nb - 1);
    for (int r = 0, rr = 0; r < nb; ++r) {
        if (r == i - 1) continue;
        for (int c = 0, cc = 0; c < nb; ++c) {
            if (c == j - 1) continue;
            minor(rr, cc) = full(r, c);
            ++cc;
        }
        ++rr;
    }
    const Complex det_minor = determinant(minor);
    if (std::abs(det_minor) <= 1e-12 * std::max(1.0, full.max_abs()))
        throw SingularMatrixError("commutative_ratio: det X^{" + std::to_string(i) +
                                      std::to_string(j) + "} vanishes",
                                  std::abs(det_minor));
    const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
    return sign * determinant(full) / det_minor;
}

}  // namespace cdis
