#include "cdis/verify.hpp"

#include <cmath>
#include <limits>

namespace cdis {

ResidualReport check_cd_system(const FieldGrid<Complex>& q, const FieldGrid<Complex>& r,
                               double tolerance) {
    const Grid& g = q.grid();
    if (g.nx != r.grid().nx || g.nt != r.grid().nt)
        throw std::invalid_argument("check_cd_system: grid mismatch");
    const FieldGrid<Complex> q_xt = fd_partial(q, FdKind::DxDtCross);
    const FieldGrid<Complex> r_xt = fd_partial(r, FdKind::DxDtCross);
    const FieldGrid<Complex> q_x = fd_partial(q, FdKind::DxCentral);
    const FieldGrid<Complex> r_x = fd_partial(r, FdKind::DxCentral);
    FieldGrid<double> norms(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            if (q_xt.masked(ix, it) || r_xt.masked(ix, it) || q_x.masked(ix, it) ||
                r_x.masked(ix, it)) {
                norms.set_masked(ix, it);
                continue;
            }
            const Complex rv = r.at(ix, it);
            const Complex e1 = q_xt.at(ix, it) + 2.0 * r_x.at(ix, it) * rv;
            const Complex e2 = r_xt.at(ix, it) - 2.0 * q_x.at(ix, it) * rv;
            norms.at(ix, it) = std::max(std::abs(e1), std::abs(e2));
        }
    return summarize_residual("cd_system", norms, tolerance);
}

ResidualReport check_circle_invariant(
    const std::function<DerivSample(double, double)>& derivs,
    const std::vector<std::pair<double, double>>& points, double tolerance) {
    ResidualReport rep;
    rep.name = "circle_invariant";
    rep.tolerance = tolerance;
    double sum = 0.0;
    long count = 0;
    for (const auto& [x, t] : points) {
        const DerivSample d = derivs(x, t);
        if (d.pole) {
            ++rep.masked_points;
            continue;
        }
        const double v = std::abs(d.dq_dx * d.dq_dx + d.dr_dx * d.dr_dx - 1.0);
        rep.max_norm = std::max(rep.max_norm, v);
        sum += v;
        ++count;
    }
    rep.mean_norm = count > 0 ? sum / count : 0.0;
    rep.verdict = rep.max_norm <= tolerance;
    return rep;
}

ResidualReport check_sine_gordon(const FieldGrid<double>& phi, double tolerance) {
    const FieldGrid<double> phi_xt = fd_partial(phi, FdKind::DxDtCross);
    const Grid& g = phi.grid();
    FieldGrid<double> norms(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            if (phi_xt.masked(ix, it)) {
                norms.set_masked(ix, it);
                continue;
            }
            norms.at(ix, it) = std::abs(phi_xt.at(ix, it) - 2.0 * std::sin(phi.at(ix, it)));
        }
    return summarize_residual("sine_gordon", norms, tolerance);
}

double sg_boundary_deviation(const FieldGrid<double>& phi) {
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    const Grid& g = phi.grid();
    double worst = 0.0;
    for (int it = 0; it < g.nt; ++it)
        for (int ix : {0, g.nx - 1}) {
            if (phi.masked(ix, it)) continue;
            const double v = phi.at(ix, it);
            worst = std::max(worst, std::abs(v - two_pi * std::round(v / two_pi)));
        }
    return worst;
}

ResidualReport check_reduction(const std::function<ReductionSample(double, double)>& field,
                               const Grid& g, double tolerance) {
    ResidualReport rep;
    rep.name = "reduction";
    rep.hx = g.hx();
    rep.ht = g.ht();
    rep.tolerance = tolerance;
    double sum = 0.0;
    long count = 0;
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            const ReductionSample s = field(g.x(ix), g.t(it));
            if (s.pole) {
                ++rep.masked_points;
                continue;
            }
            double v = std::max((s.S + s.S.dagger()).frobenius_norm(), std::abs(s.S.trace()));
            for (const Matrix& m : s.M)
                v = std::max({v, (m + m.dagger()).frobenius_norm(), std::abs(m.trace())});
            rep.max_norm = std::max(rep.max_norm, v);
            sum += v;
            ++count;
        }
    rep.mean_norm = count > 0 ? sum / count : 0.0;
    rep.verdict = rep.max_norm <= tolerance;
    return rep;
}

ResidualReport ch2_verdict(ResidualReport fine, double coarse_max, double safety,
                           double floor_abs) {
    fine.tolerance = std::max(safety * coarse_max / 4.0, floor_abs);
    fine.verdict = fine.max_norm <= fine.tolerance;
    return fine;
}

}  // namespace cdis
