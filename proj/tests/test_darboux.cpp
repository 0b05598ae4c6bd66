#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cdis/darboux.hpp"
#include "cdis/su2.hpp"
#include "test_util.hpp"

using namespace cdis;
using testutil::dist;
using testutil::rand_well_conditioned;

namespace {

std::vector<std::pair<double, double>> probe_points(std::mt19937& g, int count,
                                                    double span = 1.0) {
    std::uniform_real_distribution<double> d(-span, span);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < count; ++i) pts.emplace_back(d(g), d(g));
    return pts;
}

double sech(double u) { return 1.0 / std::cosh(u); }

}  // namespace

TEST_CASE("build_M basics") {
    const Matrix lam = Matrix::diagonal({Complex(0, 0.5), Complex(0, -0.5)});
    // Theta = I gives Lambda^{-1}
    const Matrix m0 = build_M(Matrix::identity(2), lam);
    CHECK(std::abs(m0(0, 0) - Complex(0, -2)) < 1e-14);
    CHECK(std::abs(m0(1, 1) - Complex(0, 2)) < 1e-14);

    // scalar Lambda: M = I/l regardless of Theta
    std::mt19937 g(401);
    const Matrix theta = rand_well_conditioned(g, 3);
    const Complex l(0.3, 0.8);
    const Matrix ms = build_M(theta, Matrix::identity(3) * l);
    CHECK(dist(ms, Matrix::identity(3) * (1.0 / l)) < 1e-12);

    CHECK_THROWS_AS(build_M(Matrix(2, 2), lam), SingularMatrixError);
}

TEST_CASE("build_M eigenvalues are the inverse stage eigenvalues") {
    const SeedSolution seed(su2_canonical_config());
    const SpectralStep step =
        su2_paired_step(Complex(0, 0.5), {Complex(1, 0), Complex(0.3, 0.4)});
    const ThetaValue tv = eigenfunctions(seed, step, 0.4, -0.7);
    const Matrix M = build_M(tv.theta, Matrix::diagonal(step.lambdas));
    for (const Complex& l : step.lambdas) {
        const Matrix shifted = M - Matrix::identity(2) * (1.0 / l);
        CHECK(std::abs(determinant(shifted)) < 1e-12);
    }
    // SU(2) pairing makes M anti-hermitian and traceless
    CHECK((M + M.dagger()).max_abs() < 1e-10);
    CHECK(std::abs(M.trace()) < 1e-10);
}

TEST_CASE("abelian stage is a constant shift") {
    const SeedSolution seed(su2_canonical_config());
    const Complex l1(0, 0.5);
    const DarbouxStage stage = DarbouxStage::raw(
        {l1, l1}, [&seed, l1](double x, double t) {
            return StageValue{seed.psi(l1, x, t), seed.psi_x(l1, x, t)};
        });
    const SolutionHandle h = darboux_step(seed, stage);
    std::mt19937 g(402);
    for (const auto& [x, t] : probe_points(g, 10)) {
        const auto v = h.eval(x, t);
        REQUIRE_FALSE(v.pole);
        CHECK(dist(v.S, seed.S(x, t) - Matrix::identity(2) * (1.0 / l1)) < 1e-12);
    }
    const Grid grid(-1, 1, 9, -1, 1, 9);
    const ResidualReport rep = eom_residual(h.sample_S(grid), seed.G(), 1e-10);
    CHECK(rep.verdict);
}

TEST_CASE("one-fold SU(2) soliton: amplitude and center dip") {
    const SeedSolution seed(su2_canonical_config());
    const double kappa = 0.5;
    const SpectralStep step =
        su2_paired_step(Complex(0, kappa), {Complex(1, 0), Complex(1, 0)});
    const SolutionHandle h = darboux_iterate(seed, {step});

    const auto center = h.eval(0, 0);
    REQUIRE_FALSE(center.pole);
    const ScalarFieldsValue f = extract_scalar_fields(gauge_transform(center.S));
    CHECK(std::abs(std::abs(f.r) - 1.0 / kappa) < 1e-12);
    CHECK(std::abs(f.r.imag()) < 1e-12);

    // dx q dips to 1 - 2 sech^2(0) = -1 at the soliton center
    const ScalarFieldsValue fx = extract_scalar_fields(gauge_transform(center.Sx));
    CHECK(std::abs(fx.q - Complex(-1.0, 0)) < 1e-12);

    // profile r(x, t) = (1/kappa) sech(2 kappa x + t / kappa) up to sign
    std::mt19937 g(403);
    for (const auto& [x, t] : probe_points(g, 20, 3.0)) {
        const auto v = h.eval(x, t);
        REQUIRE_FALSE(v.pole);
        const ScalarFieldsValue s = extract_scalar_fields(gauge_transform(v.S));
        const double expected = (1.0 / kappa) * sech(2 * kappa * x + t / kappa);
        CHECK(std::abs(std::abs(s.r) - expected) < 1e-11);
        const ScalarFieldsValue sx = extract_scalar_fields(gauge_transform(v.Sx));
        const double dq_expected = 1.0 - 2.0 * std::pow(sech(2 * kappa * x + t / kappa), 2);
        CHECK(std::abs(sx.q - dq_expected) < 1e-11);
    }
}

TEST_CASE("iterate: N = 0 is the seed; eom converges at second order for N = 2") {
    const SeedSolution seed(su2_canonical_config());
    const SolutionHandle h0 = darboux_iterate(seed, {});
    CHECK(dist(h0.eval(0.3, -0.2).S, seed.S(0.3, -0.2)) == 0.0);

    const std::vector<SpectralStep> steps = {
        su2_paired_step(Complex(0, 1.0), {Complex(1, 0), Complex(1, 0)}),
        su2_paired_step(Complex(0, 0.6), {Complex(1, 0), Complex(0.5, 0)})};
    const SolutionHandle h2 = darboux_iterate(seed, steps);
    const Grid coarse(-2, 2, 41, -2, 2, 41);
    const ResidualReport rc = eom_residual(h2.sample_S(coarse), seed.G(), 1.0);
    const ResidualReport rf = eom_residual(h2.sample_S(coarse.refined(1)), seed.G(), 1.0);
    const double ratio = rc.max_norm / rf.max_norm;
    CHECK(ratio > 3.3);
    CHECK(ratio < 4.7);
    CHECK(rc.max_norm > 1e-8);  // genuinely nonzero before refinement
}

TEST_CASE("eom residual converges at second order up to N = 3") {
    const SeedSolution seed(su2_canonical_config());
    const std::vector<SpectralStep> steps = {
        su2_paired_step(Complex(0, 1.0), {Complex(1, 0), Complex(1, 0)}),
        su2_paired_step(Complex(0, 0.7), {Complex(1, 0), Complex(0.5, 0)}),
        su2_paired_step(Complex(0, 1.3), {Complex(0.8, 0), Complex(1, 0)})};
    const Grid coarse(-2, 2, 41, -1, 1, 41);
    for (int N = 1; N <= 3; ++N) {
        const SolutionHandle h =
            darboux_iterate(seed, {steps.begin(), steps.begin() + N});
        const double rc = eom_residual(h.sample_S(coarse), seed.G(), 1.0).max_norm;
        const double rf =
            eom_residual(h.sample_S(coarse.refined(1)), seed.G(), 1.0).max_norm;
        CHECK(rc / rf > 3.5);
        CHECK(rc / rf < 4.5);
    }
}

TEST_CASE("zero curvature of the transformed pair converges at second order") {
    const SeedSolution seed(su2_canonical_config());
    const std::vector<SpectralStep> steps = {
        su2_paired_step(Complex(0, 1.0), {Complex(1, 0), Complex(1, 0)})};
    const SolutionHandle h = darboux_iterate(seed, steps);
    const Complex lam(0.4, 0.3);
    const Grid coarse(-2, 2, 41, -2, 2, 41);
    const Grid fine = coarse.refined(1);
    const ResidualReport rc =
        zero_curvature_residual(h.sample_U(lam, coarse), h.sample_V(lam, coarse), 1.0);
    const ResidualReport rf =
        zero_curvature_residual(h.sample_U(lam, fine), h.sample_V(lam, fine), 1.0);
    const double ratio = rc.max_norm / rf.max_norm;
    CHECK(ratio > 3.3);
    CHECK(ratio < 4.7);
}

TEST_CASE("stage order does not change S[N]") {
    const SeedSolution seed(su2_canonical_config());
    const std::vector<SpectralStep> ab = {
        su2_paired_step(Complex(0, 0.8), {Complex(1, 0), Complex(0.7, 0.2)}),
        su2_paired_step(Complex(0, 1.3), {Complex(0.5, 0), Complex(1, 0)})};
    const std::vector<SpectralStep> ba = {ab[1], ab[0]};
    const SolutionHandle h1 = darboux_iterate(seed, ab);
    const SolutionHandle h2 = darboux_iterate(seed, ba);
    std::mt19937 g(404);
    for (const auto& [x, t] : probe_points(g, 10)) {
        const auto v1 = h1.eval(x, t);
        const auto v2 = h2.eval(x, t);
        REQUIRE_FALSE(v1.pole);
        REQUIRE_FALSE(v2.pole);
        CHECK(dist(v1.S, v2.S) < 1e-9);
    }
}

TEST_CASE("permuting spectral columns within a stage leaves S[N] unchanged") {
    const SeedSolution seed(su2_canonical_config());
    SpectralStep fwd = su2_paired_step(Complex(0, 0.8), {Complex(1, 0), Complex(0.7, 0.2)});
    SpectralStep rev = fwd;
    std::swap(rev.lambdas[0], rev.lambdas[1]);
    std::swap(rev.vectors[0], rev.vectors[1]);
    const SolutionHandle h1 = darboux_iterate(seed, {fwd});
    const SolutionHandle h2 = darboux_iterate(seed, {rev});
    std::mt19937 g(409);
    for (const auto& [x, t] : probe_points(g, 10)) {
        CHECK(dist(h1.eval(x, t).S, h2.eval(x, t).S) < 1e-11);
    }
}

TEST_CASE("quasideterminant closed form matches the iteration") {
    std::mt19937 g(405);

    SUBCASE("SU(2) paired spectra, N = 1..3") {
        const SeedSolution seed(su2_canonical_config());
        std::vector<SpectralStep> steps = {
            su2_paired_step(Complex(0, 0.9), {Complex(1, 0), Complex(1, 0)}),
            su2_paired_step(Complex(0, 0.5), {Complex(1, 0), Complex(0.4, 0.3)}),
            su2_paired_step(Complex(0, 1.4), {Complex(0.8, -0.1), Complex(1, 0)})};
        for (int N = 1; N <= 3; ++N) {
            std::vector<SpectralStep> use(steps.begin(), steps.begin() + N);
            const SolutionHandle h = darboux_iterate(seed, use);
            std::vector<DarbouxStage> stages;
            for (const auto& s : use) stages.push_back(DarbouxStage::from_spectral(seed, s));
            const QuasidetS q(seed, stages);
            for (const auto& [x, t] : probe_points(g, 25)) {
                const auto vi = h.eval(x, t);
                const auto vq = q.eval(x, t);
                REQUIRE_FALSE(vi.pole);
                REQUIRE_FALSE(vq.pole);
                CHECK(dist(vi.S, vq.value) < 1e-10);
            }
        }
    }

    SUBCASE("generic complex spectra, n = 2 and n = 3") {
        for (int n : {2, 3}) {
            SystemConfig cfg;
            cfg.n = n;
            cfg.unitary_reduction = false;
            cfg.g_diag.assign(n, Complex(0, 0));
            cfg.k_diag.assign(n, Complex(0, 0));
            for (int i = 0; i < n; ++i) {
                cfg.g_diag[i] = Complex(0.2 * (i + 1), -0.1 * i);
                cfg.k_diag[i] = Complex(0.3 - 0.2 * i, 0.4 + 0.1 * i);
            }
            const SeedSolution seed(cfg);
            std::uniform_real_distribution<double> d(0.4, 1.2);
            std::vector<SpectralStep> steps;
            for (int k = 0; k < 2; ++k) {
                SpectralStep s;
                for (int i = 0; i < n; ++i) {
                    s.lambdas.push_back(Complex(d(g) * (k + 1), d(g) - 0.8));
                    std::vector<Complex> e;
                    for (int j = 0; j < n; ++j) e.push_back(testutil::rand_complex(g));
                    s.vectors.push_back(e);
                }
                steps.push_back(s);
            }
            const SolutionHandle h = darboux_iterate(seed, steps);
            std::vector<DarbouxStage> stages;
            for (const auto& s : steps) stages.push_back(DarbouxStage::from_spectral(seed, s));
            const QuasidetS q(seed, stages);
            for (const auto& [x, t] : probe_points(g, 10, 0.8)) {
                const auto vi = h.eval(x, t);
                const auto vq = q.eval(x, t);
                if (vi.pole || vq.pole) continue;
                CHECK(dist(vi.S, vq.value) < 1e-9 * std::max(1.0, vi.S.max_abs()));
            }
        }
    }
}

TEST_CASE("quasidet psi: one-fold reduction and transformed Lax pair") {
    const SeedSolution seed(su2_canonical_config());
    const SpectralStep s1 = su2_paired_step(Complex(0, 0.8), {Complex(1, 0), Complex(1, 0)});
    const SpectralStep s2 =
        su2_paired_step(Complex(0, 1.2), {Complex(1, 0), Complex(0.3, 0.3)});
    const Complex lam(0.5, 0.4);

    SUBCASE("N = 1 equals (1/l - M) psi") {
        const std::vector<DarbouxStage> stages = {DarbouxStage::from_spectral(seed, s1)};
        const QuasidetPsi qp(seed, stages, lam);
        const SolutionHandle h = darboux_iterate(seed, {s1});
        std::mt19937 g(406);
        for (const auto& [x, t] : probe_points(g, 10)) {
            const ThetaValue tv = eigenfunctions(seed, s1, x, t);
            const Matrix M = build_M(tv.theta, Matrix::diagonal(s1.lambdas));
            const Matrix expected =
                (Matrix::identity(2) * (1.0 / lam) - M) * seed.psi(lam, x, t);
            const auto v = qp.eval(x, t);
            REQUIRE_FALSE(v.pole);
            CHECK(dist(v.value, expected) < 1e-11);
            const auto vh = h.eval_psi(lam, x, t);
            REQUIRE_FALSE(vh.pole);
            CHECK(dist(v.value, vh.value) < 1e-11);
        }
    }

    SUBCASE("N = 2: psi[2] satisfies the transformed Lax pair (FD)") {
        const SolutionHandle h = darboux_iterate(seed, {s1, s2});
        const std::vector<DarbouxStage> stages = {DarbouxStage::from_spectral(seed, s1),
                                                  DarbouxStage::from_spectral(seed, s2)};
        const QuasidetPsi qp(seed, stages, lam);
        const double hstep = 1e-5;
        std::mt19937 g(407);
        for (const auto& [x, t] : probe_points(g, 8)) {
            const auto vc = qp.eval(x, t);
            const auto vp = qp.eval(x + hstep, t);
            const auto vm = qp.eval(x - hstep, t);
            const auto vtp = qp.eval(x, t + hstep);
            const auto vtm = qp.eval(x, t - hstep);
            REQUIRE_FALSE(vc.pole);
            const Matrix dx = (vp.value - vm.value) * (1.0 / (2 * hstep));
            const Matrix dt = (vtp.value - vtm.value) * (1.0 / (2 * hstep));
            const auto field = h.eval(x, t);
            auto [U, V] = lax_matrices(field.S, field.Sx, seed.G(), lam);
            const double scale = std::max(1.0, vc.value.max_abs());
            CHECK((dx - U * vc.value).max_abs() < 1e-8 * scale);
            CHECK((dt - V * vc.value).max_abs() < 1e-8 * scale);
            // cross-check against the recursion path
            const auto vh = h.eval_psi(lam, x, t);
            REQUIRE_FALSE(vh.pole);
            CHECK(dist(vc.value, vh.value) < 1e-10 * scale);
        }
    }

    SUBCASE("lambda collision is rejected") {
        const std::vector<DarbouxStage> stages = {DarbouxStage::from_spectral(seed, s1)};
        CHECK_THROWS_AS(QuasidetPsi(seed, stages, Complex(0, 0.8)), std::invalid_argument);
        const SolutionHandle h = darboux_iterate(seed, {s1});
        CHECK_THROWS_AS(h.eval_psi(Complex(0, -0.8), 0, 0), std::invalid_argument);
    }
}

TEST_CASE("psi[N] columns feed a further stage consistently") {
    const SeedSolution seed(su2_canonical_config());
    const std::vector<SpectralStep> base = {
        su2_paired_step(Complex(0, 0.9), {Complex(1, 0), Complex(1, 0)}),
        su2_paired_step(Complex(0, 0.5), {Complex(1, 0), Complex(0.6, 0.2)})};
    const SpectralStep next =
        su2_paired_step(Complex(0, 1.3), {Complex(0.7, 0.1), Complex(1, 0)});

    const SolutionHandle hN = darboux_iterate(seed, base);
    std::vector<DarbouxStage> all_stages;
    for (const auto& s : base) all_stages.push_back(DarbouxStage::from_spectral(seed, s));
    all_stages.push_back(DarbouxStage::from_spectral(seed, next));
    const QuasidetS q3(seed, all_stages);

    std::mt19937 g(408);
    for (const auto& [x, t] : probe_points(g, 10)) {
        // dressed eigenfunction columns of the next stage
        Matrix theta(2, 2);
        for (int k = 0; k < 2; ++k) {
            const auto col = hN.eval_psi(next.lambdas[k], x, t);
            REQUIRE_FALSE(col.pole);
            for (int i = 0; i < 2; ++i) {
                Complex acc = 0.0;
                for (int j = 0; j < 2; ++j) acc += col.value(i, j) * next.vectors[k][j];
                theta(i, k) = acc;
            }
        }
        const Matrix M = build_M(theta, Matrix::diagonal(next.lambdas));
        const Matrix S_next = hN.eval(x, t).S - M;
        const auto vq = q3.eval(x, t);
        REQUIRE_FALSE(vq.pole);
        CHECK(dist(S_next, vq.value) < 1e-9);
    }
}

TEST_CASE("m-conditions: FD residuals") {
    const SeedSolution seed(su2_canonical_config());

    SUBCASE("abelian stage: both conditions vanish") {
        const Complex l1(0, 0.5);
        const DarbouxStage stage = DarbouxStage::raw(
            {l1, l1}, [&seed, l1](double x, double t) {
                return StageValue{seed.psi(l1, x, t), seed.psi_x(l1, x, t)};
            });
        const SolutionHandle h = darboux_step(seed, stage);
        const Grid g(-1, 1, 11, -1, 1, 11);
        auto [m1, m2] =
            m_condition_residuals(h.sample_M(0, g), h.sample_S_before(0, g), seed.G(), 1e-11);
        CHECK(m1.verdict);
        CHECK(m2.verdict);
    }

    SUBCASE("paired stage: second-order convergence") {
        const SpectralStep s =
            su2_paired_step(Complex(0, 1.0), {Complex(1, 0), Complex(1, 0)});
        const SolutionHandle h = darboux_iterate(seed, {s});
        const Grid coarse(-2, 2, 41, -2, 2, 41);
        const Grid fine = coarse.refined(1);
        auto [c1, c2] = m_condition_residuals(h.sample_M(0, coarse),
                                              h.sample_S_before(0, coarse), seed.G(), 1.0);
        auto [f1, f2] = m_condition_residuals(h.sample_M(0, fine),
                                              h.sample_S_before(0, fine), seed.G(), 1.0);
        CHECK(c1.max_norm / f1.max_norm > 3.3);
        CHECK(c1.max_norm / f1.max_norm < 4.7);
        CHECK(c2.max_norm / f2.max_norm > 3.3);
        CHECK(c2.max_norm / f2.max_norm < 4.7);
    }

    SUBCASE("perturbed M fails by many orders of magnitude") {
        const SpectralStep s =
            su2_paired_step(Complex(0, 1.0), {Complex(1, 0), Complex(1, 0)});
        const SolutionHandle h = darboux_iterate(seed, {s});
        const double hh = 1e-4;
        const Grid g(-2 * hh, 2 * hh, 5, -2 * hh, 2 * hh, 5);
        const FieldGrid<Matrix> M_clean = h.sample_M(0, g);
        FieldGrid<Matrix> M_bad = M_clean;
        for (int it = 0; it < 5; ++it)
            for (int ix = 0; ix < 5; ++ix)
                M_bad.at(ix, it) = M_bad.at(ix, it) + Matrix::identity(2) * 0.1;
        const FieldGrid<Matrix> S = h.sample_S_before(0, g);
        auto [c1, c2] = m_condition_residuals(M_clean, S, seed.G(), 1.0);
        auto [b1, b2] = m_condition_residuals(M_bad, S, seed.G(), 1.0);
        CHECK(b1.max_norm > 1e6 * c1.max_norm);
        CHECK(b2.max_norm > 1e6 * c2.max_norm);
    }
}

TEST_CASE("singular Theta points are tagged as poles") {
    const SeedSolution seed(su2_canonical_config());
    const DarbouxStage stage = DarbouxStage::raw(
        {Complex(0, 0.5), Complex(0, -0.5)}, [](double x, double) {
            Matrix theta = Matrix::identity(2);
            theta(0, 0) = x;
            Matrix theta_x(2, 2);
            theta_x(0, 0) = 1.0;
            return StageValue{theta, theta_x};
        });
    const SolutionHandle h(seed, {stage});
    CHECK(h.eval(0.0, 0.3).pole);
    CHECK(h.eval(0.0, 0.3).pole_stage == 0);
    CHECK_FALSE(h.eval(0.5, 0.3).pole);

    const Grid g(-1, 1, 9, -1, 1, 5);
    const FieldGrid<Matrix> S = h.sample_S(g);
    CHECK(S.masked(4, 2));  // x = 0 column
    CHECK_FALSE(S.masked(0, 0));
}
