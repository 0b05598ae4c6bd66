#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdis/linalg.hpp"

namespace cdis {

/// Uniform rectangular grid in (x, t).
struct Grid {
    double x0 = 0.0, x1 = 0.0;
    int nx = 0;
    double t0 = 0.0, t1 = 0.0;
    int nt = 0;

    Grid() = default;
    Grid(double x0_, double x1_, int nx_, double t0_, double t1_, int nt_)
        : x0(x0_), x1(x1_), nx(nx_), t0(t0_), t1(t1_), nt(nt_) {
        if (nx < 3 || nt < 3) throw std::invalid_argument("Grid: need nx, nt >= 3");
        if (!(x1 > x0) || !(t1 > t0))
            throw std::invalid_argument("Grid: bounds must be strictly increasing");
    }

    double hx() const { return (x1 - x0) / (nx - 1); }
    double ht() const { return (t1 - t0) / (nt - 1); }
    double x(int ix) const { return x0 + ix * hx(); }
    double t(int it) const { return t0 + it * ht(); }

    /// Same bounds with spacings halved k times.
    Grid refined(int k) const {
        Grid g = *this;
        for (int i = 0; i < k; ++i) {
            g.nx = 2 * g.nx - 1;
            g.nt = 2 * g.nt - 1;
        }
        return g;
    }

    /// Every-other-point subgrid (spacings doubled). Requires odd nx, nt.
    Grid coarsened() const {
        if (nx % 2 == 0 || nt % 2 == 0 || nx < 5 || nt < 5)
            throw std::invalid_argument("Grid: coarsening needs odd nx, nt >= 5");
        Grid g = *this;
        g.nx = (nx + 1) / 2;
        g.nt = (nt + 1) / 2;
        return g;
    }
};

inline double sample_norm(double v) { return v < 0 ? -v : v; }
inline double sample_norm(Complex v) { return std::abs(v); }
inline double sample_norm(const Matrix& m) { return m.frobenius_norm(); }

/// Field samples over a Grid with a pole mask. Sample type is double,
/// Complex, or Matrix. Storage is t-major, x-minor.
template <typename T>
class FieldGrid {
public:
    FieldGrid() = default;
    explicit FieldGrid(const Grid& g)
        : grid_(g),
          samples_(static_cast<size_t>(g.nx) * g.nt),
          mask_(static_cast<size_t>(g.nx) * g.nt, 0) {}

    const Grid& grid() const { return grid_; }

    T& at(int ix, int it) { return samples_[idx(ix, it)]; }
    const T& at(int ix, int it) const { return samples_[idx(ix, it)]; }

    bool masked(int ix, int it) const { return mask_[idx(ix, it)] != 0; }
    void set_masked(int ix, int it) { mask_[idx(ix, it)] = 1; }

    int masked_count() const {
        int c = 0;
        for (uint8_t m : mask_) c += m;
        return c;
    }

    /// Masks every point within `radius` (Chebyshev distance) of a masked
    /// point; applied before differencing so stencils never touch a pole.
    void dilate_mask(int radius) {
        if (radius <= 0) return;
        std::vector<uint8_t> out = mask_;
        for (int it = 0; it < grid_.nt; ++it)
            for (int ix = 0; ix < grid_.nx; ++ix) {
                if (!mask_[idx(ix, it)]) continue;
                for (int dt = -radius; dt <= radius; ++dt)
                    for (int dx = -radius; dx <= radius; ++dx) {
                        int jx = ix + dx, jt = it + dt;
                        if (jx >= 0 && jx < grid_.nx && jt >= 0 && jt < grid_.nt)
                            out[idx(jx, jt)] = 1;
                    }
            }
        mask_ = out;
    }

    /// Restriction to the every-other-point subgrid.
    FieldGrid coarsened() const {
        FieldGrid out(grid_.coarsened());
        for (int it = 0; it < out.grid_.nt; ++it)
            for (int ix = 0; ix < out.grid_.nx; ++ix) {
                out.at(ix, it) = at(2 * ix, 2 * it);
                if (masked(2 * ix, 2 * it)) out.set_masked(ix, it);
            }
        return out;
    }

private:
    size_t idx(int ix, int it) const {
        return static_cast<size_t>(it) * grid_.nx + ix;
    }

    Grid grid_;
    std::vector<T> samples_;
    std::vector<uint8_t> mask_;
};

enum class FdKind { DxCentral, DtCentral, DxDtCross };

/// Second-order stencils: central differences for first derivatives, the
/// 4-point cross stencil for the mixed derivative. The boundary ring and a
/// one-point dilation of the input pole mask are masked in the result.
template <typename T>
FieldGrid<T> fd_partial(const FieldGrid<T>& f, FdKind kind) {
    const Grid& g = f.grid();
    FieldGrid<T> out(g);
    FieldGrid<T> in = f;
    in.dilate_mask(1);
    const double hx = g.hx(), ht = g.ht();
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            const bool x_edge = (ix == 0 || ix == g.nx - 1);
            const bool t_edge = (it == 0 || it == g.nt - 1);
            bool edge = false;
            switch (kind) {
                case FdKind::DxCentral: edge = x_edge; break;
                case FdKind::DtCentral: edge = t_edge; break;
                case FdKind::DxDtCross: edge = x_edge || t_edge; break;
            }
            if (edge || in.masked(ix, it)) {
                out.set_masked(ix, it);
                continue;
            }
            switch (kind) {
                case FdKind::DxCentral:
                    out.at(ix, it) = (f.at(ix + 1, it) - f.at(ix - 1, it)) * (1.0 / (2.0 * hx));
                    break;
                case FdKind::DtCentral:
                    out.at(ix, it) = (f.at(ix, it + 1) - f.at(ix, it - 1)) * (1.0 / (2.0 * ht));
                    break;
                case FdKind::DxDtCross:
                    out.at(ix, it) = (f.at(ix + 1, it + 1) - f.at(ix + 1, it - 1) -
                                      f.at(ix - 1, it + 1) + f.at(ix - 1, it - 1)) *
                                     (1.0 / (4.0 * hx * ht));
                    break;
            }
        }
    return out;
}

/// Named residual summary. verdict is pass iff max_norm <= tolerance.
struct ResidualReport {
    std::string name;
    double max_norm = 0.0;
    double mean_norm = 0.0;
    double hx = 0.0;
    double ht = 0.0;
    double tolerance = 0.0;
    bool verdict = false;
    int masked_points = 0;
};

/// Collapses a grid of residual norms into a report. Masked points are
/// excluded from both norms.
ResidualReport summarize_residual(const std::string& name, const FieldGrid<double>& norms,
                                  double tolerance);

/// JSON object with fields exactly: name, max_norm, mean_norm, hx, ht,
/// tolerance, verdict, masked_points.
std::string report_to_json_string(const ResidualReport& r);

}  // namespace cdis
