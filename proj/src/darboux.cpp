#include "cdis/darboux.hpp"

#include <cmath>

#include "cdis/quasidet.hpp"

namespace cdis {

namespace {

Matrix inv_lambda_diag(const std::vector<Complex>& lambdas) {
    std::vector<Complex> inv(lambdas.size());
    for (size_t i = 0; i < lambdas.size(); ++i) {
        if (std::abs(lambdas[i]) < kLambdaCollisionTol)
            throw std::invalid_argument("stage eigenvalue is zero");
        inv[i] = 1.0 / lambdas[i];
    }
    return Matrix::diagonal(inv);
}

/// Theta_k Lambda_k^{-p}: scales column b by lambda_b^{-p}.
Matrix scale_columns_by_inv_power(const Matrix& theta, const std::vector<Complex>& lambdas,
                                  int p) {
    Matrix out = theta;
    for (int b = 0; b < theta.cols(); ++b) {
        const Complex f = std::pow(1.0 / lambdas[b], p);
        for (int a = 0; a < theta.rows(); ++a) out(a, b) *= f;
    }
    return out;
}

}  // namespace

DarbouxStage DarbouxStage::from_spectral(const SeedSolution& seed, const SpectralStep& step) {
    auto bad = validate_step(step, seed.config());
    if (!bad.empty()) throw ConfigError(bad);
    DarbouxStage st;
    st.lambdas = step.lambdas;
    st.theta = [seed, step](double x, double t) {
        const ThetaValue v = eigenfunctions(seed, step, x, t);
        return StageValue{v.theta, v.theta_x};
    };
    return st;
}

DarbouxStage DarbouxStage::raw(std::vector<Complex> lambdas,
                               std::function<StageValue(double, double)> theta) {
    DarbouxStage st;
    st.lambdas = std::move(lambdas);
    st.theta = std::move(theta);
    return st;
}

Matrix build_M(const Matrix& theta_val, const Matrix& lambda_diag) {
    const int n = theta_val.dim();
    if (lambda_diag.dim() != n) throw std::invalid_argument("build_M: dimension mismatch");
    std::vector<Complex> inv(n);
    for (int i = 0; i < n; ++i) {
        if (std::abs(lambda_diag(i, i)) < kLambdaCollisionTol)
            throw SingularMatrixError("build_M: Lambda singular", std::abs(lambda_diag(i, i)));
        inv[i] = 1.0 / lambda_diag(i, i);
    }
    return theta_val * Matrix::diagonal(inv) * inverse(theta_val);
}

SolutionHandle::SolutionHandle(SeedSolution seed, std::vector<DarbouxStage> stages)
    : seed_(std::move(seed)), stages_(std::move(stages)) {
    for (const auto& st : stages_) {
        if (st.lambdas.empty() || static_cast<int>(st.lambdas.size()) != seed_.config().n)
            throw std::invalid_argument("stage eigenvalue count must equal n");
        for (const Complex& l : st.lambdas)
            if (std::abs(l) < kLambdaCollisionTol)
                throw std::invalid_argument("stage eigenvalue is zero");
    }
}

SolutionHandle::DressState SolutionHandle::dress(double x, double t) const {
    DressState st;
    st.S = seed_.S(x, t);
    st.Sx = seed_.Sx();
    st.thetas.reserve(stages_.size());
    for (const auto& stage : stages_) st.thetas.push_back(stage.theta(x, t));

    for (size_t k = 0; k < stages_.size(); ++k) {
        const Matrix inv_lam = inv_lambda_diag(stages_[k].lambdas);
        const Matrix& theta = st.thetas[k].theta;
        const Matrix& theta_x = st.thetas[k].theta_x;
        Matrix theta_inv;
        try {
            theta_inv = inverse(theta);
        } catch (const SingularMatrixError&) {
            st.pole = true;
            st.pole_stage = static_cast<int>(k);
            return st;
        }
        const Matrix M = theta * inv_lam * theta_inv;
        const Matrix Mx = (theta_x * inv_lam - M * theta_x) * theta_inv;
        st.S = st.S - M;
        st.Sx = st.Sx - Mx;
        st.M.push_back(M);
        st.Mx.push_back(Mx);
        for (size_t j = k + 1; j < stages_.size(); ++j) {
            const Matrix inv_lam_j = inv_lambda_diag(stages_[j].lambdas);
            const Matrix nt = st.thetas[j].theta * inv_lam_j - M * st.thetas[j].theta;
            const Matrix ntx = st.thetas[j].theta_x * inv_lam_j - Mx * st.thetas[j].theta -
                               M * st.thetas[j].theta_x;
            st.thetas[j] = StageValue{nt, ntx};
        }
    }
    return st;
}

SolutionHandle::FieldValue SolutionHandle::eval(double x, double t) const {
    DressState st = dress(x, t);
    FieldValue v;
    v.pole = st.pole;
    v.pole_stage = st.pole_stage;
    if (!st.pole) {
        v.S = std::move(st.S);
        v.Sx = std::move(st.Sx);
        v.M = std::move(st.M);
    }
    return v;
}

void SolutionHandle::check_lambda_clear(Complex lambda) const {
    for (const auto& stage : stages_)
        for (const Complex& l : stage.lambdas)
            if (std::abs(lambda - l) < kLambdaCollisionTol)
                throw std::invalid_argument(
                    "spectral parameter collides with a stage eigenvalue");
}

MatrixSample SolutionHandle::eval_psi(Complex lambda, double x, double t) const {
    check_lambda_clear(lambda);
    const DressState st = dress(x, t);
    MatrixSample out;
    if (st.pole) {
        out.pole = true;
        out.pole_stage = st.pole_stage;
        return out;
    }
    Matrix psi = seed_.psi(lambda, x, t);
    for (const Matrix& M : st.M) psi = psi * (1.0 / lambda) - M * psi;
    out.value = std::move(psi);
    return out;
}

FieldGrid<Matrix> SolutionHandle::sample_S(const Grid& g) const {
    FieldGrid<Matrix> out(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            const FieldValue v = eval(g.x(ix), g.t(it));
            if (v.pole) out.set_masked(ix, it);
            else out.at(ix, it) = v.S;
        }
    return out;
}

FieldGrid<Matrix> SolutionHandle::sample_M(int stage, const Grid& g) const {
    if (stage < 0 || stage >= order()) throw std::invalid_argument("sample_M: bad stage index");
    FieldGrid<Matrix> out(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            const FieldValue v = eval(g.x(ix), g.t(it));
            if (v.pole) out.set_masked(ix, it);
            else out.at(ix, it) = v.M[stage];
        }
    return out;
}

FieldGrid<Matrix> SolutionHandle::sample_S_before(int stage, const Grid& g) const {
    if (stage < 0 || stage >= order())
        throw std::invalid_argument("sample_S_before: bad stage index");
    FieldGrid<Matrix> out(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            const FieldValue v = eval(g.x(ix), g.t(it));
            if (v.pole) {
                out.set_masked(ix, it);
                continue;
            }
            Matrix s = seed_.S(g.x(ix), g.t(it));
            for (int j = 0; j < stage; ++j) s = s - v.M[j];
            out.at(ix, it) = s;
        }
    return out;
}

FieldGrid<Matrix> SolutionHandle::sample_U(Complex lambda, const Grid& g) const {
    FieldGrid<Matrix> out(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            const FieldValue v = eval(g.x(ix), g.t(it));
            if (v.pole) out.set_masked(ix, it);
            else out.at(ix, it) = v.Sx * lambda;
        }
    return out;
}

FieldGrid<Matrix> SolutionHandle::sample_V(Complex lambda, const Grid& g) const {
    FieldGrid<Matrix> out(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            const FieldValue v = eval(g.x(ix), g.t(it));
            if (v.pole) out.set_masked(ix, it);
            else out.at(ix, it) = commutator(v.S, seed_.G()) + seed_.G() * (1.0 / lambda);
        }
    return out;
}

FieldGrid<Matrix> SolutionHandle::sample_psi(Complex lambda, const Grid& g) const {
    FieldGrid<Matrix> out(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            const MatrixSample v = eval_psi(lambda, g.x(ix), g.t(it));
            if (v.pole) out.set_masked(ix, it);
            else out.at(ix, it) = v.value;
        }
    return out;
}

SolutionHandle darboux_step(const SeedSolution& seed, const DarbouxStage& stage) {
    return SolutionHandle(seed, {stage});
}

SolutionHandle darboux_iterate(const SeedSolution& seed,
                               const std::vector<SpectralStep>& steps) {
    std::vector<DarbouxStage> stages;
    stages.reserve(steps.size());
    for (const auto& s : steps) stages.push_back(DarbouxStage::from_spectral(seed, s));
    return SolutionHandle(seed, std::move(stages));
}

QuasidetS::QuasidetS(SeedSolution seed, std::vector<DarbouxStage> stages)
    : seed_(std::move(seed)), stages_(std::move(stages)) {}

MatrixSample QuasidetS::eval(double x, double t) const {
    const int N = static_cast<int>(stages_.size());
    const int n = seed_.config().n;
    MatrixSample out;
    if (N == 0) {
        out.value = seed_.S(x, t);
        return out;
    }
    std::vector<Matrix> thetas;
    thetas.reserve(N);
    for (const auto& st : stages_) thetas.push_back(st.theta(x, t).theta);

    Matrix A(N * n, N * n);
    for (int m = 0; m < N; ++m)
        for (int k = 0; k < N; ++k) {
            const Matrix blk = scale_columns_by_inv_power(thetas[k], stages_[k].lambdas, m);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) A(m * n + a, k * n + b) = blk(a, b);
        }
    Matrix B(N * n, n);
    for (int a = 0; a < n; ++a) B((N - 1) * n + a, a) = 1.0;
    Matrix C(n, N * n);
    for (int k = 0; k < N; ++k) {
        const Matrix blk = scale_columns_by_inv_power(thetas[k], stages_[k].lambdas, N);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) C(a, k * n + b) = blk(a, b);
    }
    try {
        out.value = seed_.S(x, t) + block_quasidet(A, B, C, Matrix(n, n));
    } catch (const SingularMatrixError&) {
        out.pole = true;
    }
    return out;
}

QuasidetPsi::QuasidetPsi(SeedSolution seed, std::vector<DarbouxStage> stages, Complex lambda)
    : seed_(std::move(seed)), stages_(std::move(stages)), lambda_(lambda) {
    for (const auto& st : stages_)
        for (const Complex& l : st.lambdas)
            if (std::abs(lambda_ - l) < kLambdaCollisionTol)
                throw std::invalid_argument(
                    "spectral parameter collides with a stage eigenvalue");
}

MatrixSample QuasidetPsi::eval(double x, double t) const {
    const int N = static_cast<int>(stages_.size());
    const int n = seed_.config().n;
    MatrixSample out;
    const Matrix psi = seed_.psi(lambda_, x, t);
    if (N == 0) {
        out.value = psi;
        return out;
    }
    std::vector<Matrix> thetas;
    thetas.reserve(N);
    for (const auto& st : stages_) thetas.push_back(st.theta(x, t).theta);

    Matrix A(N * n, N * n);
    for (int m = 0; m < N; ++m)
        for (int k = 0; k < N; ++k) {
            const Matrix blk = scale_columns_by_inv_power(thetas[k], stages_[k].lambdas, m);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) A(m * n + a, k * n + b) = blk(a, b);
        }
    Matrix B(N * n, n);
    for (int m = 0; m < N; ++m) {
        const Complex f = std::pow(1.0 / lambda_, m);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) B(m * n + a, b) = f * psi(a, b);
    }
    Matrix C(n, N * n);
    for (int k = 0; k < N; ++k) {
        const Matrix blk = scale_columns_by_inv_power(thetas[k], stages_[k].lambdas, N);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) C(a, k * n + b) = blk(a, b);
    }
    const Matrix D = psi * std::pow(1.0 / lambda_, N);
    try {
        out.value = block_quasidet(A, B, C, D);
    } catch (const SingularMatrixError&) {
        out.pole = true;
    }
    return out;
}

std::pair<ResidualReport, ResidualReport> m_condition_residuals(
    const FieldGrid<Matrix>& M_grid, const FieldGrid<Matrix>& S_grid, const Matrix& G,
    double tolerance) {
    const Grid& g = M_grid.grid();
    if (g.nx != S_grid.grid().nx || g.nt != S_grid.grid().nt)
        throw std::invalid_argument("m_condition_residuals: grid mismatch");
    const FieldGrid<Matrix> Mx = fd_partial(M_grid, FdKind::DxCentral);
    const FieldGrid<Matrix> Mt = fd_partial(M_grid, FdKind::DtCentral);
    const FieldGrid<Matrix> Sx = fd_partial(S_grid, FdKind::DxCentral);
    FieldGrid<double> n1(g), n2(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            if (Mx.masked(ix, it) || Mt.masked(ix, it) || Sx.masked(ix, it)) {
                n1.set_masked(ix, it);
                n2.set_masked(ix, it);
                continue;
            }
            const Matrix& M = M_grid.at(ix, it);
            const Matrix& S = S_grid.at(ix, it);
            const Matrix r1 = Mx.at(ix, it) * M - commutator(Sx.at(ix, it), M);
            const Matrix r2 = Mt.at(ix, it) - commutator(commutator(S, G), M) -
                              commutator(G, M) * M;
            n1.at(ix, it) = r1.frobenius_norm();
            n2.at(ix, it) = r2.frobenius_norm();
        }
    return {summarize_residual("m1", n1, tolerance), summarize_residual("m2", n2, tolerance)};
}

}  // namespace cdis
