#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "cdis/grid.hpp"
#include "cdis/linalg.hpp"

namespace cdis {

/// Diagonal data defining the integrable system: G and the seed slope
/// K = dS/dx. Under the unitary reduction both must be anti-hermitian
/// (pure imaginary entries) and traceless.
struct SystemConfig {
    int n = 2;
    std::vector<Complex> g_diag;
    std::vector<Complex> k_diag;
    bool unitary_reduction = true;
};

/// The SU(2) system with seed dq/dx = 1, r = 0:
/// K = i diag(1, -1), G = -(i/2) diag(1, -1).
SystemConfig su2_canonical_config();

/// Returns every violated invariant; empty means the config is valid.
std::vector<std::string> validate_config(const SystemConfig& c);

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::vector<std::string>& violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// One Darboux stage worth of spectral data: n nonzero, pairwise distinct
/// eigenvalues and n constant columns. Under the unitary reduction the
/// eigenvalues must be pure imaginary and, for n = 2, paired as (l, -l)
/// with orthogonal columns.
struct SpectralStep {
    std::vector<Complex> lambdas;
    std::vector<std::vector<Complex>> vectors;
};

/// Builds the paired SU(2) step {l, -l} with e2 orthogonal to e1.
SpectralStep su2_paired_step(Complex lambda, const std::vector<Complex>& e1);

std::vector<std::string> validate_step(const SpectralStep& s, const SystemConfig& c);

/// Eigenvalues closer than this are treated as colliding.
constexpr double kLambdaCollisionTol = 1e-10;

/// The vacuum solution S = x K with eigenfunction
/// psi(l; x, t) = exp(l x K) exp(t/l G) (diagonal factors commute).
/// Construction validates the config and verifies both Lax equations on a
/// 3x3 probe grid over [-1,1]^2 by central differences.
class SeedSolution {
public:
    explicit SeedSolution(const SystemConfig& c);

    const SystemConfig& config() const { return config_; }
    const Matrix& K() const { return K_; }
    const Matrix& G() const { return G_; }

    Matrix S(double x, double /*t*/) const { return K_ * Complex(x); }
    Matrix Sx() const { return K_; }

    Matrix psi(Complex lambda, double x, double t) const;
    Matrix psi_x(Complex lambda, double x, double t) const;
    Matrix psi_t(Complex lambda, double x, double t) const;

private:
    void probe_lax_equations() const;

    SystemConfig config_;
    Matrix K_;
    Matrix G_;
};

/// Lax pair U = l dS/dx, V = [S, G] + G / l. Throws on l = 0.
std::pair<Matrix, Matrix> lax_matrices(const Matrix& S_val, const Matrix& Sx_val,
                                       const Matrix& G, Complex lambda);

/// Eigenfunction matrix Theta(x,t) whose k-th column is psi(l_k) e_k, with
/// analytic x and t derivatives.
struct ThetaValue {
    Matrix theta;
    Matrix theta_x;
    Matrix theta_t;
};

ThetaValue eigenfunctions(const SeedSolution& seed, const SpectralStep& step, double x,
                          double t);

/// Reports theta_i^dag theta_j over sample points. The quantity is constant
/// (and zero for orthogonal constant columns) when the spectra are conjugate
/// paired; otherwise it is merely reported, not asserted.
struct OrthogonalityEntry {
    int i = 0;
    int j = 0;
    bool conjugate_paired = false;
    double max_abs = 0.0;
};

std::vector<OrthogonalityEntry> theta_orthogonality(
    const SeedSolution& seed, const SpectralStep& step,
    const std::vector<std::pair<double, double>>& points);

/// Max interior residual of dt dx S - [[S, G], dx S] by second-order
/// differences (cross stencil for the mixed derivative).
ResidualReport eom_residual(const FieldGrid<Matrix>& S_grid, const Matrix& G,
                            double tolerance);

/// Max interior residual of dt U - dx V + [U, V].
ResidualReport zero_curvature_residual(const FieldGrid<Matrix>& U_grid,
                                       const FieldGrid<Matrix>& V_grid, double tolerance);

}  // namespace cdis
