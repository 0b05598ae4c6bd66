#include "cdis/model.hpp"

#include <cmath>
#include <sstream>

namespace cdis {

namespace {

constexpr double kImagTol = 1e-12;

Complex inner(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    Complex s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm2(const std::vector<Complex>& a) { return std::sqrt(std::abs(inner(a, a))); }

}  // namespace

SystemConfig su2_canonical_config() {
    SystemConfig c;
    c.n = 2;
    c.g_diag = {Complex(0, -0.5), Complex(0, 0.5)};
    c.k_diag = {Complex(0, 1), Complex(0, -1)};
    c.unitary_reduction = true;
    return c;
}

ConfigError::ConfigError(const std::vector<std::string>& violations)
    : std::invalid_argument([&violations] {
          std::ostringstream os;
          os << "invalid system config:";
          for (const auto& v : violations) os << "\n  - " << v;
          return os.str();
      }()),
      violations_(violations) {}

std::vector<std::string> validate_config(const SystemConfig& c) {
    std::vector<std::string> bad;
    if (c.n < 1) bad.push_back("group dimension n must be >= 1");
    if (static_cast<int>(c.g_diag.size()) != c.n)
        bad.push_back("g_diag must have n entries");
    if (static_cast<int>(c.k_diag.size()) != c.n)
        bad.push_back("k_diag must have n entries");
    for (const Complex& z : c.g_diag)
        if (!is_finite(z)) bad.push_back("g_diag has a non-finite entry");
    for (const Complex& z : c.k_diag)
        if (!is_finite(z)) bad.push_back("k_diag has a non-finite entry");
    if (!bad.empty()) return bad;

    double kmax = 0.0;
    for (const Complex& z : c.k_diag) kmax = std::max(kmax, std::abs(z));
    if (kmax == 0.0) bad.push_back("K is zero (seed slope dS/dx must not vanish)");

    if (c.unitary_reduction) {
        double scale = 0.0;
        for (const Complex& z : c.g_diag) scale = std::max(scale, std::abs(z));
        for (const Complex& z : c.k_diag) scale = std::max(scale, std::abs(z));
        const double tol = kImagTol * std::max(1.0, scale);
        for (const Complex& z : c.g_diag)
            if (std::abs(z.real()) > tol) {
                bad.push_back("G not anti-hermitian (g_diag entry has a real part)");
                break;
            }
        for (const Complex& z : c.k_diag)
            if (std::abs(z.real()) > tol) {
                bad.push_back("K not anti-hermitian (k_diag entry has a real part)");
                break;
            }
        Complex gs = 0.0, ks = 0.0;
        for (const Complex& z : c.g_diag) gs += z;
        for (const Complex& z : c.k_diag) ks += z;
        if (std::abs(gs) > tol) bad.push_back("G not traceless (g_diag entries do not sum to 0)");
        if (std::abs(ks) > tol) bad.push_back("K not traceless (k_diag entries do not sum to 0)");
    }
    return bad;
}

SpectralStep su2_paired_step(Complex lambda, const std::vector<Complex>& e1) {
    if (e1.size() != 2) throw std::invalid_argument("su2_paired_step: e1 must have 2 entries");
    SpectralStep s;
    s.lambdas = {lambda, -lambda};
    s.vectors = {e1, {-std::conj(e1[1]), std::conj(e1[0])}};
    return s;
}

std::vector<std::string> validate_step(const SpectralStep& s, const SystemConfig& c) {
    std::vector<std::string> bad;
    const int n = c.n;
    if (static_cast<int>(s.lambdas.size()) != n)
        bad.push_back("step must carry n eigenvalues");
    if (static_cast<int>(s.vectors.size()) != n)
        bad.push_back("step must carry n constant columns");
    if (!bad.empty()) return bad;

    for (int k = 0; k < n; ++k) {
        if (!is_finite(s.lambdas[k])) bad.push_back("eigenvalue " + std::to_string(k) + " not finite");
        else if (std::abs(s.lambdas[k]) < kLambdaCollisionTol)
            bad.push_back("eigenvalue " + std::to_string(k) + " is zero");
        if (static_cast<int>(s.vectors[k].size()) != n)
            bad.push_back("column " + std::to_string(k) + " has wrong length");
        else {
            bool fin = true;
            for (const Complex& z : s.vectors[k]) fin = fin && is_finite(z);
            if (!fin) bad.push_back("column " + std::to_string(k) + " not finite");
            else if (norm2(s.vectors[k]) == 0.0)
                bad.push_back("column " + std::to_string(k) + " is zero");
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(s.lambdas[i] - s.lambdas[j]) < kLambdaCollisionTol)
                bad.push_back("eigenvalues " + std::to_string(i) + " and " + std::to_string(j) +
                              " collide");

    if (c.unitary_reduction && bad.empty()) {
        for (int k = 0; k < n; ++k)
            if (std::abs(s.lambdas[k].real()) > kImagTol * std::abs(s.lambdas[k]))
                bad.push_back("reduction requires pure imaginary eigenvalues (index " +
                              std::to_string(k) + ")");
        if (n != 2) {
            bad.push_back("reduction pairing is defined for n = 2 only");
        } else {
            if (std::abs(s.lambdas[0] + s.lambdas[1]) > kImagTol * std::abs(s.lambdas[0]))
                bad.push_back("reduction requires the paired spectrum {l, -l}");
            const double sc = norm2(s.vectors[0]) * norm2(s.vectors[1]);
            if (std::abs(inner(s.vectors[0], s.vectors[1])) > 1e-12 * std::max(1.0, sc))
                bad.push_back("reduction requires orthogonal constant columns");
        }
    }
    return bad;
}

SeedSolution::SeedSolution(const SystemConfig& c) : config_(c) {
    auto bad = validate_config(c);
    if (!bad.empty()) throw ConfigError(bad);
    K_ = Matrix::diagonal(c.k_diag);
    G_ = Matrix::diagonal(c.g_diag);
    probe_lax_equations();
}

Matrix SeedSolution::psi(Complex lambda, double x, double t) const {
    if (std::abs(lambda) < kLambdaCollisionTol)
        throw std::invalid_argument("psi: spectral parameter must be nonzero");
    std::vector<Complex> d(config_.n);
    for (int i = 0; i < config_.n; ++i)
        d[i] = lambda * x * config_.k_diag[i] + t / lambda * config_.g_diag[i];
    return diag_exp(d);
}

Matrix SeedSolution::psi_x(Complex lambda, double x, double t) const {
    return K_ * lambda * psi(lambda, x, t);
}

Matrix SeedSolution::psi_t(Complex lambda, double x, double t) const {
    return G_ * (1.0 / lambda) * psi(lambda, x, t);
}

void SeedSolution::probe_lax_equations() const {
    const double h = 1e-5;
    const Complex probes[2] = {Complex(0, 0.5), Complex(1, 0)};
    for (const Complex& lam : probes) {
        for (int ix = 0; ix < 3; ++ix)
            for (int it = 0; it < 3; ++it) {
                const double x = -1.0 + ix;
                const double t = -1.0 + it;
                const Matrix p = psi(lam, x, t);
                const Matrix dx_fd = (psi(lam, x + h, t) - psi(lam, x - h, t)) * (1.0 / (2 * h));
                const Matrix dt_fd = (psi(lam, x, t + h) - psi(lam, x, t - h)) * (1.0 / (2 * h));
                auto [U, V] = lax_matrices(S(x, t), K_, G_, lam);
                const double scale = std::max(1.0, p.max_abs());
                if ((dx_fd - U * p).max_abs() > 1e-8 * scale ||
                    (dt_fd - V * p).max_abs() > 1e-8 * scale)
                    throw std::logic_error("seed eigenfunction fails the Lax equations");
            }
    }
}

std::pair<Matrix, Matrix> lax_matrices(const Matrix& S_val, const Matrix& Sx_val,
                                       const Matrix& G, Complex lambda) {
    if (std::abs(lambda) < 1e-15)
        throw std::invalid_argument("lax_matrices: spectral parameter must be nonzero");
    return {Sx_val * lambda, commutator(S_val, G) + G * (1.0 / lambda)};
}

ThetaValue eigenfunctions(const SeedSolution& seed, const SpectralStep& step, double x,
                          double t) {
    auto bad = validate_step(step, seed.config());
    if (!bad.empty()) throw ConfigError(bad);
    const int n = seed.config().n;
    ThetaValue v{Matrix(n, n), Matrix(n, n), Matrix(n, n)};
    for (int k = 0; k < n; ++k) {
        const Complex lam = step.lambdas[k];
        const Matrix p = seed.psi(lam, x, t);
        const Matrix px = seed.psi_x(lam, x, t);
        const Matrix pt = seed.psi_t(lam, x, t);
        for (int i = 0; i < n; ++i) {
            Complex c = 0.0, cx = 0.0, ct = 0.0;
            for (int j = 0; j < n; ++j) {
                c += p(i, j) * step.vectors[k][j];
                cx += px(i, j) * step.vectors[k][j];
                ct += pt(i, j) * step.vectors[k][j];
            }
            v.theta(i, k) = c;
            v.theta_x(i, k) = cx;
            v.theta_t(i, k) = ct;
        }
    }
    return v;
}

std::vector<OrthogonalityEntry> theta_orthogonality(
    const SeedSolution& seed, const SpectralStep& step,
    const std::vector<std::pair<double, double>>& points) {
    std::vector<OrthogonalityEntry> out;
    const int n = seed.config().n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            OrthogonalityEntry e;
            e.i = i;
            e.j = j;
            e.conjugate_paired =
                std::abs(std::conj(step.lambdas[i]) - step.lambdas[j]) < kLambdaCollisionTol;
            for (const auto& [x, t] : points) {
                const ThetaValue v = eigenfunctions(seed, step, x, t);
                Complex dot = 0.0;
                for (int a = 0; a < n; ++a) dot += std::conj(v.theta(a, i)) * v.theta(a, j);
                e.max_abs = std::max(e.max_abs, std::abs(dot));
            }
            out.push_back(e);
        }
    return out;
}

ResidualReport eom_residual(const FieldGrid<Matrix>& S_grid, const Matrix& G,
                            double tolerance) {
    const FieldGrid<Matrix> Sx = fd_partial(S_grid, FdKind::DxCentral);
    const FieldGrid<Matrix> Sxt = fd_partial(S_grid, FdKind::DxDtCross);
    FieldGrid<double> norms(S_grid.grid());
    for (int it = 0; it < S_grid.grid().nt; ++it)
        for (int ix = 0; ix < S_grid.grid().nx; ++ix) {
            if (Sx.masked(ix, it) || Sxt.masked(ix, it)) {
                norms.set_masked(ix, it);
                continue;
            }
            const Matrix r =
                Sxt.at(ix, it) - commutator(commutator(S_grid.at(ix, it), G), Sx.at(ix, it));
            norms.at(ix, it) = r.frobenius_norm();
        }
    return summarize_residual("eom", norms, tolerance);
}

ResidualReport zero_curvature_residual(const FieldGrid<Matrix>& U_grid,
                                       const FieldGrid<Matrix>& V_grid, double tolerance) {
    const Grid& g = U_grid.grid();
    if (g.nx != V_grid.grid().nx || g.nt != V_grid.grid().nt)
        throw std::invalid_argument("zero_curvature_residual: grid mismatch");
    const FieldGrid<Matrix> Ut = fd_partial(U_grid, FdKind::DtCentral);
    const FieldGrid<Matrix> Vx = fd_partial(V_grid, FdKind::DxCentral);
    FieldGrid<double> norms(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            if (Ut.masked(ix, it) || Vx.masked(ix, it)) {
                norms.set_masked(ix, it);
                continue;
            }
            const Matrix r = Ut.at(ix, it) - Vx.at(ix, it) +
                             commutator(U_grid.at(ix, it), V_grid.at(ix, it));
            norms.at(ix, it) = r.frobenius_norm();
        }
    return summarize_residual("zero_curvature", norms, tolerance);
}

}  // namespace cdis
