#include "cdis/su2.hpp"

#include <cmath>
#include <limits>

namespace cdis {

namespace {

constexpr double kCollisionTol = 1e-10;
constexpr double kTauZeroRel = 1e-12;
constexpr double kUnimodularTol = 1e-6;
constexpr double kPi = 3.14159265358979323846;

struct ColData {
    Complex lambda;
    ScalarEigen e;
    std::vector<Complex> inv_pow;  // lambda^{-p}, p = 0..M-1
};

enum class RowVariant { base, dt, dx, dxt };

/// Row letter of Delta_1 at row p in a size-M determinant: the bottom row is
/// X^{(M-1)} and letters alternate upward. Delta_2 swaps the letters.
bool row_is_x(int p, int M, bool delta1) {
    const bool x_for_delta1 = ((M - 1 - p) % 2) == 0;
    return delta1 ? x_for_delta1 : !x_for_delta1;
}

Complex entry(const ColData& c, int p, bool letter_x, RowVariant v) {
    Complex z;
    switch (v) {
        case RowVariant::base: z = letter_x ? c.e.X : c.e.Y; break;
        case RowVariant::dt: z = letter_x ? c.e.X_t : c.e.Y_t; break;
        case RowVariant::dx: z = letter_x ? c.e.X_x : c.e.Y_x; break;
        case RowVariant::dxt: z = 0.5 * (letter_x ? c.e.X : c.e.Y); break;
    }
    return c.inv_pow[static_cast<size_t>(p)] * z;
}

Complex det_with_variants(const std::vector<ColData>& cols, bool delta1,
                          const std::vector<RowVariant>& variants) {
    const int M = static_cast<int>(cols.size());
    Matrix m(M, M);
    for (int p = 0; p < M; ++p) {
        const bool lx = row_is_x(p, M, delta1);
        for (int k = 0; k < M; ++k) m(p, k) = entry(cols[k], p, lx, variants[p]);
    }
    return determinant(m);
}

/// Row-norm product bound using the generic eigenfunction magnitude
/// max(|X|, |Y|) per entry, so a vanishing determinant is judged against the
/// size of the data it was built from (the determinant of a 1x1 block would
/// otherwise be its own scale).
double hadamard_scale(const std::vector<ColData>& cols) {
    const int M = static_cast<int>(cols.size());
    double prod = 1.0;
    for (int p = 0; p < M; ++p) {
        double s = 0.0;
        for (int k = 0; k < M; ++k) {
            const double mag = std::max(std::abs(cols[k].e.X), std::abs(cols[k].e.Y)) *
                               std::abs(cols[k].inv_pow[static_cast<size_t>(p)]);
            s += mag * mag;
        }
        prod *= std::sqrt(s);
    }
    return prod;
}

struct DetSet {
    Complex d = 0, d_t = 0, d_x = 0, d_xt = 0;
    double scale = 0;
};

/// Jacobi expansion: derivative of a determinant is the sum over rows of the
/// determinant with that row differentiated; the mixed derivative adds the
/// doubly-differentiated diagonal and the distinct row pairs.
DetSet eval_det_set(const std::vector<ColData>& cols, bool delta1, bool with_xt) {
    const int M = static_cast<int>(cols.size());
    DetSet out;
    std::vector<RowVariant> v(M, RowVariant::base);
    out.d = det_with_variants(cols, delta1, v);
    out.scale = hadamard_scale(cols);
    for (int p = 0; p < M; ++p) {
        v[p] = RowVariant::dt;
        out.d_t += det_with_variants(cols, delta1, v);
        v[p] = RowVariant::dx;
        out.d_x += det_with_variants(cols, delta1, v);
        v[p] = RowVariant::base;
    }
    if (with_xt) {
        for (int p = 0; p < M; ++p) {
            v[p] = RowVariant::dxt;
            out.d_xt += det_with_variants(cols, delta1, v);
            v[p] = RowVariant::base;
        }
        for (int p = 0; p < M; ++p)
            for (int q = 0; q < M; ++q) {
                if (p == q) continue;
                v[p] = RowVariant::dt;
                v[q] = RowVariant::dx;
                out.d_xt += det_with_variants(cols, delta1, v);
                v[p] = RowVariant::base;
                v[q] = RowVariant::base;
            }
    }
    return out;
}

ColData make_col(const ScalarSpectralPoint& p, double x, double t, int max_pow) {
    ColData c;
    c.lambda = p.lambda;
    c.e = scalar_vacuum_eigenfunctions(p, x, t);
    c.inv_pow.resize(static_cast<size_t>(max_pow) + 1);
    const Complex inv = 1.0 / p.lambda;
    Complex f = 1.0;
    for (int k = 0; k <= max_pow; ++k) {
        c.inv_pow[static_cast<size_t>(k)] = f;
        f *= inv;
    }
    return c;
}

ColData make_col_from_eigen(Complex lambda, const ScalarEigen& e, int max_pow) {
    ColData c;
    c.lambda = lambda;
    c.e = e;
    c.inv_pow.resize(static_cast<size_t>(max_pow) + 1);
    const Complex inv = 1.0 / lambda;
    Complex f = 1.0;
    for (int k = 0; k <= max_pow; ++k) {
        c.inv_pow[static_cast<size_t>(k)] = f;
        f *= inv;
    }
    return c;
}

}  // namespace

Matrix gauge_omega() {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix m(2, 2);
    m(0, 0) = s;
    m(0, 1) = s;
    m(1, 0) = Complex(0, -s);
    m(1, 1) = Complex(0, s);
    return m;
}

Matrix gauge_transform(const Matrix& S_val) {
    if (!S_val.is_square() || S_val.dim() != 2)
        throw std::invalid_argument("gauge_transform: 2x2 input required");
    const Matrix omega = gauge_omega();
    return omega.dagger() * S_val * omega;  // omega is unitary
}

ScalarFieldsValue extract_scalar_fields(const Matrix& S_tilde) {
    if (!S_tilde.is_square() || S_tilde.dim() != 2)
        throw std::invalid_argument("extract_scalar_fields: 2x2 input required");
    const Complex q_plus_ir = S_tilde(0, 1) * Complex(0, -1);
    const Complex q_minus_ir = S_tilde(1, 0) * Complex(0, -1);
    return {0.5 * (q_plus_ir + q_minus_ir), Complex(0, -0.5) * (q_plus_ir - q_minus_ir)};
}

std::vector<std::string> validate_points(const std::vector<ScalarSpectralPoint>& pts,
                                         bool reduced) {
    std::vector<std::string> bad;
    for (size_t k = 0; k < pts.size(); ++k) {
        const auto& p = pts[k];
        const std::string tag = "point " + std::to_string(k) + ": ";
        if (!is_finite(p.lambda) || !is_finite(p.alpha) || !is_finite(p.beta)) {
            bad.push_back(tag + "non-finite data");
            continue;
        }
        if (std::abs(p.lambda) < kCollisionTol) bad.push_back(tag + "lambda is zero");
        if (std::abs(p.alpha) == 0.0 && std::abs(p.beta) == 0.0)
            bad.push_back(tag + "(alpha, beta) must not both vanish");
        if (reduced) {
            if (std::abs(p.lambda.real()) > 1e-12 * std::abs(p.lambda))
                bad.push_back(tag + "reduction requires pure imaginary lambda");
            if (std::abs(std::imag(std::conj(p.alpha) * p.beta)) >
                1e-12 * std::max(1.0, std::abs(p.alpha) * std::abs(p.beta)))
                bad.push_back(tag + "reduction requires a real constant ratio beta/alpha");
        }
    }
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            if (std::abs(pts[i].lambda - pts[j].lambda) < kCollisionTol)
                bad.push_back("points " + std::to_string(i) + " and " + std::to_string(j) +
                              " have colliding eigenvalues");
    return bad;
}

ScalarEigen scalar_vacuum_eigenfunctions(const ScalarSpectralPoint& p, double x, double t) {
    if (std::abs(p.lambda) < kCollisionTol)
        throw std::invalid_argument("scalar eigenfunction: lambda must be nonzero");
    const Complex theta = Complex(0, 1) * p.lambda * x - Complex(0, 1) * t / (2.0 * p.lambda);
    const Complex ep = std::exp(theta);
    const Complex em = std::exp(-theta);
    const Complex a = p.alpha;
    const Complex b = Complex(0, 1) * p.beta;
    ScalarEigen e;
    e.X = a * ep + b * em;
    e.Y = a * ep - b * em;
    const Complex dtheta_t = Complex(0, -1) / (2.0 * p.lambda);
    const Complex dtheta_x = Complex(0, 1) * p.lambda;
    e.X_t = dtheta_t * e.Y;
    e.Y_t = dtheta_t * e.X;
    e.X_x = dtheta_x * e.Y;
    e.Y_x = dtheta_x * e.X;
    return e;
}

std::optional<ScalarEigen> dress_eigen(const ScalarEigen& target, Complex target_lambda,
                                       const ScalarEigen& fold, Complex fold_lambda) {
    const double scale = std::max(std::abs(fold.X), std::abs(fold.Y));
    if (std::abs(fold.X) <= kTauZeroRel * scale || std::abs(fold.Y) <= kTauZeroRel * scale)
        return std::nullopt;
    const Complex il = 1.0 / target_lambda;
    const Complex il1 = 1.0 / fold_lambda;
    const Complex rx = fold.X / fold.Y;  // X1/Y1
    const Complex ry = fold.Y / fold.X;
    const Complex rx_x = (fold.X_x * fold.Y - fold.X * fold.Y_x) / (fold.Y * fold.Y);
    const Complex rx_t = (fold.X_t * fold.Y - fold.X * fold.Y_t) / (fold.Y * fold.Y);
    const Complex ry_x = (fold.Y_x * fold.X - fold.Y * fold.X_x) / (fold.X * fold.X);
    const Complex ry_t = (fold.Y_t * fold.X - fold.Y * fold.X_t) / (fold.X * fold.X);
    ScalarEigen out;
    out.X = il * target.X - il1 * rx * target.Y;
    out.Y = il * target.Y - il1 * ry * target.X;
    out.X_x = il * target.X_x - il1 * (rx_x * target.Y + rx * target.Y_x);
    out.X_t = il * target.X_t - il1 * (rx_t * target.Y + rx * target.Y_t);
    out.Y_x = il * target.Y_x - il1 * (ry_x * target.X + ry * target.X_x);
    out.Y_t = il * target.Y_t - il1 * (ry_t * target.X + ry * target.X_t);
    return out;
}

std::optional<ScalarFoldValue> scalar_onefold(const ScalarEigen& fold, Complex q, Complex r,
                                              SignConvention convention) {
    const double scale = std::max(std::abs(fold.X), std::abs(fold.Y));
    if (std::abs(fold.X) <= kTauZeroRel * scale || std::abs(fold.Y) <= kTauZeroRel * scale)
        return std::nullopt;
    const double s = sign_factor(convention);
    ScalarFoldValue out;
    out.q = q + s * (fold.X_t / fold.X + fold.Y_t / fold.Y);
    out.r = -r + s * Complex(0, 1) * (fold.X_t / fold.X - fold.Y_t / fold.Y);
    return out;
}

DeltaEvaluator::DeltaEvaluator(std::vector<ScalarSpectralPoint> points)
    : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("DeltaEvaluator: need at least one point");
    auto bad = validate_points(points_, false);
    if (!bad.empty()) {
        std::string msg = "invalid spectral points:";
        for (const auto& b : bad) msg += "\n  - " + b;
        throw std::invalid_argument(msg);
    }
}

DeltaEvaluator::Value DeltaEvaluator::eval(double x, double t) const {
    const int N = order();
    std::vector<ColData> cols;
    cols.reserve(points_.size());
    for (const auto& p : points_) cols.push_back(make_col(p, x, t, N - 1));
    const DetSet s1 = eval_det_set(cols, true, true);
    const DetSet s2 = eval_det_set(cols, false, true);
    Value v;
    v.d1 = s1.d;
    v.d1_t = s1.d_t;
    v.d1_x = s1.d_x;
    v.d1_xt = s1.d_xt;
    v.scale1 = s1.scale;
    v.d2 = s2.d;
    v.d2_t = s2.d_t;
    v.d2_x = s2.d_x;
    v.d2_xt = s2.d_xt;
    v.scale2 = s2.scale;
    return v;
}

DeltaEvaluator::BorderedValue DeltaEvaluator::eval_bordered(Complex lambda, Complex X,
                                                            Complex Y, double x,
                                                            double t) const {
    const int N = order();
    for (const auto& p : points_)
        if (std::abs(lambda - p.lambda) < kCollisionTol)
            throw std::invalid_argument("bordered evaluation: lambda collides with spectrum");
    std::vector<ColData> cols;
    cols.reserve(points_.size() + 1);
    for (const auto& p : points_) cols.push_back(make_col(p, x, t, N));
    ScalarEigen ext{};
    ext.X = X;
    ext.Y = Y;
    cols.push_back(make_col_from_eigen(lambda, ext, N));
    BorderedValue bv;
    std::vector<RowVariant> v(static_cast<size_t>(N) + 1, RowVariant::base);
    bv.d1 = det_with_variants(cols, true, v);
    bv.d2 = det_with_variants(cols, false, v);
    return bv;
}

bool is_tau_zero(Complex det, double hadamard_scale) {
    return std::abs(det) <= kTauZeroRel * hadamard_scale;
}

ScalarSolution::ScalarSolution(std::vector<ScalarSpectralPoint> points,
                               SignConvention convention)
    : convention_(convention) {
    if (!points.empty()) delta_.emplace(std::move(points));
}

ScalarSolution::Value ScalarSolution::eval(double x, double t) const {
    Value out;
    if (!delta_) {
        out.q = Complex(x, 0);
        out.dq_dx = 1.0;
        return out;
    }
    const DeltaEvaluator::Value d = delta_->eval(x, t);
    if (is_tau_zero(d.d1, d.scale1) || is_tau_zero(d.d2, d.scale2)) {
        out.pole = true;
        return out;
    }
    const double s = sign_factor(convention_);
    const Complex lt1 = d.d1_t / d.d1;
    const Complex lt2 = d.d2_t / d.d2;
    const Complex lt1_x = (d.d1_xt * d.d1 - d.d1_t * d.d1_x) / (d.d1 * d.d1);
    const Complex lt2_x = (d.d2_xt * d.d2 - d.d2_t * d.d2_x) / (d.d2 * d.d2);
    out.q = Complex(x, 0) + s * (lt1 + lt2);
    out.r = s * Complex(0, 1) * (lt1 - lt2);
    out.dq_dx = 1.0 + s * (lt1_x + lt2_x);
    out.dr_dx = s * Complex(0, 1) * (lt1_x - lt2_x);
    out.dphi_dt = Complex(0, 2) * (lt1 - lt2);
    const Complex w = d.d1 / d.d2;
    out.phi_principal = -2.0 * std::arg(w);
    out.unimodularity_defect = std::abs(std::abs(w) - 1.0);
    return out;
}

std::optional<ScalarEigen> ScalarSolution::eval_xy(const ScalarSpectralPoint& p, double x,
                                                   double t) const {
    if (!delta_) return scalar_vacuum_eigenfunctions(p, x, t);
    for (const auto& q : delta_->points())
        if (std::abs(p.lambda - q.lambda) < kCollisionTol)
            throw std::invalid_argument("eval_xy: lambda collides with spectrum");
    const DeltaEvaluator::Value d = delta_->eval(x, t);
    if (is_tau_zero(d.d1, d.scale1) || is_tau_zero(d.d2, d.scale2)) return std::nullopt;
    const ScalarEigen vac = scalar_vacuum_eigenfunctions(p, x, t);

    const int N = delta_->order();
    std::vector<ColData> cols;
    cols.reserve(static_cast<size_t>(N) + 1);
    for (const auto& q : delta_->points()) cols.push_back(make_col(q, x, t, N));
    cols.push_back(make_col_from_eigen(p.lambda, vac, N));

    const DetSet b1 = eval_det_set(cols, true, false);
    const DetSet b2 = eval_det_set(cols, false, false);
    // X[N] = bordered Delta_1 / Delta_2[N], Y[N] = bordered Delta_2 / Delta_1[N].
    ScalarEigen out;
    out.X = b1.d / d.d2;
    out.Y = b2.d / d.d1;
    out.X_t = (b1.d_t * d.d2 - b1.d * d.d2_t) / (d.d2 * d.d2);
    out.X_x = (b1.d_x * d.d2 - b1.d * d.d2_x) / (d.d2 * d.d2);
    out.Y_t = (b2.d_t * d.d1 - b2.d * d.d1_t) / (d.d1 * d.d1);
    out.Y_x = (b2.d_x * d.d1 - b2.d * d.d1_x) / (d.d1 * d.d1);
    return out;
}

SineGordonField sample_sine_gordon(const ScalarSolution& sol, const Grid& g) {
    SineGordonField out{FieldGrid<double>(g), 0};
    std::vector<double> prev_row_ref(static_cast<size_t>(g.nx),
                                     std::numeric_limits<double>::quiet_NaN());
    for (int it = 0; it < g.nt; ++it) {
        bool have_ref = false;
        double ref = 0.0;
        for (int ix = 0; ix < g.nx; ++ix) {
            const ScalarSolution::Value v = sol.eval(g.x(ix), g.t(it));
            if (v.pole || v.unimodularity_defect > kUnimodularTol) {
                out.phi.set_masked(ix, it);
                if (!v.pole) ++out.branch_failures;
                continue;
            }
            double phi = v.phi_principal;
            if (!have_ref && it > 0 && !std::isnan(prev_row_ref[static_cast<size_t>(ix)])) {
                // align the row start to the previous row for t-continuity
                ref = prev_row_ref[static_cast<size_t>(ix)];
                have_ref = true;
            }
            if (have_ref) {
                const double k = std::round((ref - phi) / (4.0 * kPi));
                phi += 4.0 * kPi * k;
            }
            out.phi.at(ix, it) = phi;
            ref = phi;
            have_ref = true;
        }
        for (int ix = 0; ix < g.nx; ++ix)
            prev_row_ref[static_cast<size_t>(ix)] =
                out.phi.masked(ix, it) ? std::numeric_limits<double>::quiet_NaN()
                                       : out.phi.at(ix, it);
    }
    return out;
}

double phi_x_span(const FieldGrid<double>& phi, int it) {
    const Grid& g = phi.grid();
    int first = -1, last = -1;
    for (int ix = 0; ix < g.nx; ++ix) {
        if (phi.masked(ix, it)) continue;
        if (first < 0) first = ix;
        last = ix;
    }
    if (first < 0 || first == last) return 0.0;
    return phi.at(last, it) - phi.at(first, it);
}

}  // namespace cdis
