#pragma once

#include <functional>
#include <vector>

#include "cdis/grid.hpp"
#include "cdis/model.hpp"

namespace cdis {

/// Eigenfunction matrix value with its analytic x-derivative.
struct StageValue {
    Matrix theta;
    Matrix theta_x;
};

/// One Darboux stage: a diagonal eigenvalue matrix and the seed
/// eigenfunction matrix it acts through. M = Theta Lambda^{-1} Theta^{-1}
/// is formed per evaluation point.
struct DarbouxStage {
    std::vector<Complex> lambdas;
    std::function<StageValue(double, double)> theta;

    static DarbouxStage from_spectral(const SeedSolution& seed, const SpectralStep& step);

    /// Unvalidated stage from raw data; repeated eigenvalues are allowed
    /// (the abelian Lambda = l I case is a legitimate degenerate input).
    static DarbouxStage raw(std::vector<Complex> lambdas,
                            std::function<StageValue(double, double)> theta);

    Matrix lambda_matrix() const { return Matrix::diagonal(lambdas); }
};

/// M = Theta Lambda^{-1} Theta^{-1}. Its eigenvalues are exactly the inverse
/// stage eigenvalues. Throws SingularMatrixError on singular input.
Matrix build_M(const Matrix& theta_val, const Matrix& lambda_diag);

/// Evaluation result carrying a pole tag instead of fabricated values when
/// some dressed Theta is singular at the point.
struct MatrixSample {
    Matrix value;
    bool pole = false;
    int pole_stage = -1;
};

/// N-fold Darboux dressing of a vacuum seed. Stages are given through their
/// seed eigenfunctions; the recursion dresses stage k+1 data with the stage-k
/// Darboux matrix internally. Evaluation is pure per point.
class SolutionHandle {
public:
    SolutionHandle(SeedSolution seed, std::vector<DarbouxStage> stages);

    int order() const { return static_cast<int>(stages_.size()); }
    const SeedSolution& seed() const { return seed_; }

    struct FieldValue {
        Matrix S;
        Matrix Sx;
        std::vector<Matrix> M;  // dressed M_k per stage
        bool pole = false;
        int pole_stage = -1;
    };

    FieldValue eval(double x, double t) const;

    /// Transformed eigenfunction psi[N](lambda) at a point. lambda must stay
    /// clear of every stage eigenvalue.
    MatrixSample eval_psi(Complex lambda, double x, double t) const;

    FieldGrid<Matrix> sample_S(const Grid& g) const;
    FieldGrid<Matrix> sample_M(int stage, const Grid& g) const;
    /// Field the given stage dresses: S - sum of the earlier stages' M.
    /// The m-conditions on M_k hold against this background.
    FieldGrid<Matrix> sample_S_before(int stage, const Grid& g) const;
    FieldGrid<Matrix> sample_U(Complex lambda, const Grid& g) const;
    FieldGrid<Matrix> sample_V(Complex lambda, const Grid& g) const;
    FieldGrid<Matrix> sample_psi(Complex lambda, const Grid& g) const;

private:
    struct DressState {
        std::vector<StageValue> thetas;
        Matrix S;
        Matrix Sx;
        std::vector<Matrix> M;
        std::vector<Matrix> Mx;
        bool pole = false;
        int pole_stage = -1;
    };
    DressState dress(double x, double t) const;
    void check_lambda_clear(Complex lambda) const;

    SeedSolution seed_;
    std::vector<DarbouxStage> stages_;
};

/// One-fold transformation: S[1] = S - M, psi[1] = (1/l - M) psi.
SolutionHandle darboux_step(const SeedSolution& seed, const DarbouxStage& stage);

SolutionHandle darboux_iterate(const SeedSolution& seed,
                               const std::vector<SpectralStep>& steps);

/// Quasideterminant closed form of S[N]: the big block matrix in
/// Theta_k Lambda_k^{-m} expanded about its zero corner block. Agrees with
/// the iterated construction.
class QuasidetS {
public:
    QuasidetS(SeedSolution seed, std::vector<DarbouxStage> stages);
    MatrixSample eval(double x, double t) const;

private:
    SeedSolution seed_;
    std::vector<DarbouxStage> stages_;
    std::vector<std::vector<Complex>> inv_lambda_pows_;  // [stage][power] diagonals kept whole
};

/// Quasideterminant closed form of psi[N](lambda) with the boxed
/// lambda^{-N} psi entry.
class QuasidetPsi {
public:
    QuasidetPsi(SeedSolution seed, std::vector<DarbouxStage> stages, Complex lambda);
    MatrixSample eval(double x, double t) const;

private:
    SeedSolution seed_;
    std::vector<DarbouxStage> stages_;
    Complex lambda_;
};

/// FD residuals of the two covariance conditions on M:
///   (m1)  dx M . M = [dx S, M]
///   (m2)  dt M = [[S, G], M] + [G, M] M
std::pair<ResidualReport, ResidualReport> m_condition_residuals(
    const FieldGrid<Matrix>& M_grid, const FieldGrid<Matrix>& S_grid, const Matrix& G,
    double tolerance);

}  // namespace cdis
