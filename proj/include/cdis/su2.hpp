#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdis/grid.hpp"
#include "cdis/linalg.hpp"

namespace cdis {

/// The two candidate sign conventions for the one-fold scalar maps; they
/// differ in the sign of the dt-log terms. Only `oracle` satisfies the
/// coupled system, and it matches the gauge image of the matrix engine
/// exactly. The default everywhere is `oracle`.
enum class SignConvention { oracle, paper };

inline double sign_factor(SignConvention c) {
    return c == SignConvention::oracle ? -1.0 : 1.0;
}

/// Fixed gauge matrix (1/sqrt2) [[1, 1], [-i, i]].
Matrix gauge_omega();

/// Conjugation S -> Omega^{-1} S Omega. 2x2 input only.
Matrix gauge_transform(const Matrix& S_val);

/// Off-diagonal extraction from the gauged field i [[0, q+ir], [q-ir, 0]].
struct ScalarFieldsValue {
    Complex q;
    Complex r;
};
ScalarFieldsValue extract_scalar_fields(const Matrix& S_tilde);

/// One spectral point of the scalar reduction. (alpha, beta) are the
/// constants of the matrix-engine column; the scalar eigenfunctions are
/// their gauge image. Under the reduction lambda is pure imaginary and
/// alpha, beta are real.
struct ScalarSpectralPoint {
    Complex lambda;
    Complex alpha;
    Complex beta;
};

std::vector<std::string> validate_points(const std::vector<ScalarSpectralPoint>& pts,
                                         bool reduced);

/// Vacuum scalar eigenfunctions at one point, with analytic derivatives:
///   X = alpha e^theta + i beta e^{-theta},  Y = alpha e^theta - i beta e^{-theta}
/// where theta = i l x - i t / (2 l). (X, Y)(0,0) is the gauge image of
/// (alpha, beta) up to the dropped 1/sqrt2 normalization.
struct ScalarEigen {
    Complex X, Y;
    Complex X_x, Y_x;
    Complex X_t, Y_t;
};

ScalarEigen scalar_vacuum_eigenfunctions(const ScalarSpectralPoint& p, double x, double t);

/// One Darboux fold applied to a target eigenfunction pair:
///   X' = X/l - (X1/(l1 Y1)) Y,   Y' = Y/l - (Y1/(l1 X1)) X,
/// derivatives propagated by product rule. Returns nullopt at a zero of
/// X1 or Y1.
std::optional<ScalarEigen> dress_eigen(const ScalarEigen& target, Complex target_lambda,
                                       const ScalarEigen& fold, Complex fold_lambda);

/// One fold applied to the fields at a point, through the eigenfunction pair
/// (X1, Y1) carried by `fold`:
///   q' = q + s dt log(X1 Y1),   r' = -r + s i dt log(X1 / Y1),
/// which coincides with the ratio form q - s (i/2)(X1^(1)/Y1 + Y1^(1)/X1).
/// Returns nullopt at a zero of X1 or Y1. Nesting these (with dress_eigen on
/// the remaining pairs) reproduces the determinant engine.
struct ScalarFoldValue {
    Complex q;
    Complex r;
};
std::optional<ScalarFoldValue> scalar_onefold(const ScalarEigen& fold, Complex q, Complex r,
                                              SignConvention convention);

/// Evaluates the Delta_1 / Delta_2 determinants of the N spectral points,
/// their bordered (N+1)-size versions, and analytic t, x, xt derivatives.
/// Row p of Delta_1 holds Z^{(p)} = lambda^{-p} Z with Z alternating so the
/// bottom row is X^{(size-1)}; Delta_2 swaps X and Y.
class DeltaEvaluator {
public:
    explicit DeltaEvaluator(std::vector<ScalarSpectralPoint> points);

    int order() const { return static_cast<int>(points_.size()); }
    const std::vector<ScalarSpectralPoint>& points() const { return points_; }

    struct Value {
        Complex d1 = 0, d2 = 0;
        Complex d1_t = 0, d2_t = 0;
        Complex d1_x = 0, d2_x = 0;
        Complex d1_xt = 0, d2_xt = 0;
        /// Hadamard-bound scales for zero detection.
        double scale1 = 0, scale2 = 0;
    };
    Value eval(double x, double t) const;

    struct BorderedValue {
        Complex d1 = 0, d2 = 0;
    };
    BorderedValue eval_bordered(Complex lambda, Complex X, Complex Y, double x,
                                double t) const;

private:
    std::vector<ScalarSpectralPoint> points_;
};

/// Whether a determinant counts as a tau-function zero at this magnitude.
bool is_tau_zero(Complex det, double hadamard_scale);

/// N-soliton scalar solution from the determinant engine:
///   q[N] = q + s dt log(Delta_1 Delta_2),
///   r[N] = (-1)^N r + s i dt log(Delta_1 / Delta_2),
/// with s = -1 (oracle) or +1 (paper), on the vacuum seed q = x, r = 0.
/// The sine-Gordon field is always phi[N] = phi + 2i log(Delta_1 / Delta_2),
/// so r[N] = s/2 dphi/dt holds with the single global sign s.
class ScalarSolution {
public:
    /// An empty point list gives the vacuum q = x, r = 0, phi = 0.
    ScalarSolution(std::vector<ScalarSpectralPoint> points,
                   SignConvention convention = SignConvention::oracle);

    int order() const { return delta_ ? delta_->order() : 0; }
    SignConvention convention() const { return convention_; }
    const DeltaEvaluator& delta() const { return *delta_; }

    struct Value {
        Complex q = 0, r = 0;
        Complex dq_dx = 0, dr_dx = 0;
        Complex dphi_dt = 0;
        /// Principal value of phi[N] in (-2pi, 2pi]; continuity across grid
        /// rows is the sine-Gordon sampler's job.
        double phi_principal = 0;
        /// |.|Delta_1/Delta_2| - 1|; nonzero signals a non-unimodular ratio.
        double unimodularity_defect = 0;
        bool pole = false;
    };
    Value eval(double x, double t) const;

    /// Dressed eigenfunction pair (X[N], Y[N])(lambda) through the bordered
    /// determinants. Returns pole at a tau-function zero.
    std::optional<ScalarEigen> eval_xy(const ScalarSpectralPoint& p, double x, double t) const;

private:
    std::optional<DeltaEvaluator> delta_;
    SignConvention convention_;
};

/// Sampled sine-Gordon field with 4pi-branch unwrapping: serial along each
/// grid row from the x0 side, rows aligned through their first column.
struct SineGordonField {
    FieldGrid<double> phi;
    int branch_failures = 0;
};

SineGordonField sample_sine_gordon(const ScalarSolution& sol, const Grid& g);

/// Total variation proxy: phi(x1, t) - phi(x0, t) along row `it`.
double phi_x_span(const FieldGrid<double>& phi, int it);

}  // namespace cdis
