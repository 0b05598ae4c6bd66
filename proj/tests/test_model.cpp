#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cdis/model.hpp"
#include "test_util.hpp"

using namespace cdis;
using testutil::dist;
using testutil::rand_complex;

namespace {

std::vector<std::pair<double, double>> random_points(std::mt19937& g, int count,
                                                     double span = 1.0) {
    std::uniform_real_distribution<double> d(-span, span);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < count; ++i) pts.emplace_back(d(g), d(g));
    return pts;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK(validate_config(su2_canonical_config()).empty());

    SystemConfig bad = su2_canonical_config();
    bad.g_diag = {Complex(1, 0), Complex(-1, 0)};
    const auto v1 = validate_config(bad);
    REQUIRE(v1.size() == 1);
    CHECK(v1[0].find("anti-hermitian") != std::string::npos);

    bad = su2_canonical_config();
    bad.g_diag = {Complex(0, -1), Complex(0, -1)};
    const auto v2 = validate_config(bad);
    REQUIRE(v2.size() == 1);
    CHECK(v2[0].find("traceless") != std::string::npos);

    bad = su2_canonical_config();
    bad.k_diag = {Complex(0, 0), Complex(0, 0)};
    const auto v3 = validate_config(bad);
    CHECK(!v3.empty());
    CHECK(v3[0].find("zero") != std::string::npos);

    // every violation is listed, not just the first
    bad = su2_canonical_config();
    bad.g_diag = {Complex(1, 0), Complex(1, 0)};
    CHECK(validate_config(bad).size() == 2);

    CHECK_THROWS_AS(SeedSolution{bad}, ConfigError);
}

TEST_CASE("seed eigenfunction closed form") {
    const SeedSolution seed(su2_canonical_config());
    CHECK(dist(seed.psi(Complex(0, 1), 0, 0), Matrix::identity(2)) == 0.0);

    // lambda = i: psi(0, t) = diag(e^{-t/2}, e^{t/2})
    for (double t : {-1.0, 0.3, 2.0}) {
        const Matrix p = seed.psi(Complex(0, 1), 0, t);
        CHECK(std::abs(p(0, 0) - std::exp(-t / 2)) < 1e-13 * std::exp(std::abs(t) / 2));
        CHECK(std::abs(p(1, 1) - std::exp(t / 2)) < 1e-13 * std::exp(std::abs(t) / 2));
    }
}

TEST_CASE("seed satisfies both Lax equations (finite differences)") {
    const SeedSolution seed(su2_canonical_config());
    std::mt19937 g(301);
    const double h = 1e-5;
    for (const auto& [x, t] : random_points(g, 25)) {
        for (Complex lam : {Complex(0, 0.5), Complex(0.8, 0.3)}) {
            const Matrix p = seed.psi(lam, x, t);
            const Matrix dx = (seed.psi(lam, x + h, t) - seed.psi(lam, x - h, t)) *
                              (1.0 / (2 * h));
            const Matrix dt = (seed.psi(lam, x, t + h) - seed.psi(lam, x, t - h)) *
                              (1.0 / (2 * h));
            auto [U, V] = lax_matrices(seed.S(x, t), seed.Sx(), seed.G(), lam);
            CHECK((dx - U * p).max_abs() < 1e-9 * std::max(1.0, p.max_abs()));
            CHECK((dt - V * p).max_abs() < 1e-9 * std::max(1.0, p.max_abs()));
            // analytic derivatives match the FD probes
            CHECK((seed.psi_x(lam, x, t) - dx).max_abs() < 1e-9 * std::max(1.0, p.max_abs()));
            CHECK((seed.psi_t(lam, x, t) - dt).max_abs() < 1e-9 * std::max(1.0, p.max_abs()));
        }
    }
}

TEST_CASE("lax_matrices") {
    const SeedSolution seed(su2_canonical_config());
    const Complex lam(0.4, -0.2);
    auto [U, V] = lax_matrices(seed.S(0.7, -0.3), seed.Sx(), seed.G(), lam);
    CHECK(dist(U, seed.K() * lam) == 0.0);  // S = xK commutes with G
    CHECK(dist(V, seed.G() * (1.0 / lam)) < 1e-15);

    auto [U2, V2] = lax_matrices(seed.G(), seed.Sx(), seed.G(), Complex(1, 0));
    CHECK(dist(V2, seed.G()) == 0.0);

    CHECK_THROWS_AS(lax_matrices(seed.S(0, 0), seed.Sx(), seed.G(), Complex(0, 0)),
                    std::invalid_argument);

    // [S, G] stays anti-hermitian for anti-hermitian S, G
    std::mt19937 g(302);
    Matrix a(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = rand_complex(g);
    const Matrix S_ah = a - a.dagger();
    const Matrix c = commutator(S_ah, seed.G());
    CHECK((c + c.dagger()).max_abs() < 1e-13);
}

TEST_CASE("spectral step validation and pairing") {
    const SystemConfig c = su2_canonical_config();
    const SpectralStep good = su2_paired_step(Complex(0, 0.5), {Complex(1, 0), Complex(1, 0)});
    CHECK(validate_step(good, c).empty());

    SpectralStep bad = good;
    bad.lambdas[1] = bad.lambdas[0];
    CHECK(!validate_step(bad, c).empty());

    bad = good;
    bad.lambdas = {Complex(0.5, 0), Complex(-0.5, 0)};
    CHECK(!validate_step(bad, c).empty());  // not pure imaginary under reduction

    bad = good;
    bad.vectors[1] = bad.vectors[0];
    CHECK(!validate_step(bad, c).empty());  // not orthogonal

    bad = good;
    bad.lambdas[0] = Complex(0, 0);
    CHECK(!validate_step(bad, c).empty());

    SystemConfig free_cfg = c;
    free_cfg.unitary_reduction = false;
    SpectralStep generic;
    generic.lambdas = {Complex(0.5, 0.1), Complex(-0.3, 0.2)};
    generic.vectors = {{Complex(1, 0), Complex(0.2, 0)}, {Complex(0, 1), Complex(1, 0)}};
    CHECK(validate_step(generic, free_cfg).empty());
}

TEST_CASE("eigenfunctions") {
    const SeedSolution seed(su2_canonical_config());
    SpectralStep step = su2_paired_step(Complex(0, 0.5), {Complex(1, 0), Complex(0, 0)});
    // basis columns at the origin give the identity
    const ThetaValue v0 = eigenfunctions(seed, step, 0, 0);
    CHECK(dist(v0.theta, Matrix::identity(2)) < 1e-15);

    // each column solves both Lax equations (FD oracle); vacuum [S, G] = 0
    std::mt19937 g(303);
    const double h = 1e-5;
    step = su2_paired_step(Complex(0, 0.7), {Complex(0.8, 0.1), Complex(0.4, -0.3)});
    for (const auto& [x, t] : random_points(g, 25)) {
        const ThetaValue vm = eigenfunctions(seed, step, x - h, t);
        const ThetaValue vp = eigenfunctions(seed, step, x + h, t);
        const ThetaValue vtm = eigenfunctions(seed, step, x, t - h);
        const ThetaValue vtp = eigenfunctions(seed, step, x, t + h);
        const ThetaValue vc = eigenfunctions(seed, step, x, t);
        for (int k = 0; k < 2; ++k) {
            for (int i = 0; i < 2; ++i) {
                const Complex fd = (vp.theta(i, k) - vm.theta(i, k)) / (2 * h);
                const Complex fd_t = (vtp.theta(i, k) - vtm.theta(i, k)) / (2 * h);
                Complex rhs = 0.0, rhs_t = 0.0;
                for (int j = 0; j < 2; ++j) {
                    rhs += step.lambdas[k] * seed.Sx()(i, j) * vc.theta(j, k);
                    rhs_t += seed.G()(i, j) / step.lambdas[k] * vc.theta(j, k);
                }
                CHECK(std::abs(fd - rhs) < 1e-9 * std::max(1.0, std::abs(rhs)));
                CHECK(std::abs(fd_t - rhs_t) < 1e-9 * std::max(1.0, std::abs(rhs_t)));
                CHECK(std::abs(vc.theta_x(i, k) - fd) < 1e-9 * std::max(1.0, std::abs(fd)));
                CHECK(std::abs(vc.theta_t(i, k) - fd_t) <
                      1e-9 * std::max(1.0, std::abs(fd_t)));
            }
        }
    }
}

TEST_CASE("theta orthogonality diagnostic") {
    const SeedSolution seed(su2_canonical_config());
    std::mt19937 g(304);
    const auto pts = random_points(g, 8);

    // conjugate-paired spectrum with orthogonal columns: identically zero
    const SpectralStep paired =
        su2_paired_step(Complex(0, 0.5), {Complex(0.6, 0.2), Complex(1.0, -0.4)});
    for (const auto& e : theta_orthogonality(seed, paired, pts)) {
        CHECK(e.conjugate_paired);
        CHECK(e.max_abs < 1e-12);
    }

    // non-conjugate spectrum: reported, not asserted
    SystemConfig free_cfg = su2_canonical_config();
    free_cfg.unitary_reduction = false;
    const SeedSolution free_seed(free_cfg);
    SpectralStep generic;
    generic.lambdas = {Complex(0.5, 0.3), Complex(0.2, -0.4)};
    generic.vectors = {{Complex(1, 0), Complex(0, 0)}, {Complex(0, 0), Complex(1, 0)}};
    const auto entries = theta_orthogonality(free_seed, generic, pts);
    REQUIRE(entries.size() == 1);
    CHECK_FALSE(entries[0].conjugate_paired);
}

TEST_CASE("eom residual: vacuum passes, garbage fails") {
    const SeedSolution seed(su2_canonical_config());
    const Grid g(-1, 1, 9, -1, 1, 9);
    FieldGrid<Matrix> S(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) S.at(ix, it) = seed.S(g.x(ix), g.t(it));
    const ResidualReport ok = eom_residual(S, seed.G(), 1e-12);
    CHECK(ok.verdict);
    CHECK(ok.max_norm < 1e-12);

    std::mt19937 rg(305);
    FieldGrid<Matrix> junk(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) junk.at(ix, it) = testutil::rand_matrix(rg, 2, 2);
    const ResidualReport bad = eom_residual(junk, seed.G(), 1e-6);
    CHECK_FALSE(bad.verdict);
    CHECK(bad.max_norm > 0.1);
}

TEST_CASE("zero-curvature residual: vacuum pair exact, mismatched pair fails") {
    const SeedSolution seed(su2_canonical_config());
    const Complex lam(0, 0.7);
    const Grid g(-1, 1, 9, -1, 1, 9);
    FieldGrid<Matrix> U(g), V(g), V_wrong(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            auto [u, v] = lax_matrices(seed.S(g.x(ix), g.t(it)), seed.Sx(), seed.G(), lam);
            U.at(ix, it) = u;
            V.at(ix, it) = v;
            V_wrong.at(ix, it) = v + seed.S(g.x(ix), g.t(it));
        }
    CHECK(zero_curvature_residual(U, V, 1e-12).verdict);
    const ResidualReport bad = zero_curvature_residual(U, V_wrong, 1e-6);
    CHECK_FALSE(bad.verdict);
    CHECK(bad.max_norm > 0.1);
}
