#include "helpers.hpp"
#include "symid/errors.hpp"
#include "symid/evaluation.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace testing;

namespace {

ContinuousSystem first_order() {
    ContinuousSystem s;
    s.F = Matrix::Constant(1, 1, -1.0);
    s.G = Matrix::Ones(1, 1);
    s.C = Matrix::Ones(1, 1);
    s.h = 0.1;
    return s;
}

ContinuousSystem random_continuous(Eigen::Index n, Eigen::Index m, Eigen::Index p, Rng& rng) {
    ContinuousSystem s;
    s.F = -random_spd(n, rng, 0.05, 5.0);
    s.G = gaussian(n, m, rng);
    s.C = gaussian(p, n, rng);
    s.h = 0.1;
    return s;
}

// max over a log-spaced grid of the largest singular value
double sweep(const ContinuousSystem& s, int points = 10000) {
    double best = 0.0;
    for (double w : logspace(-4.0, 4.0, points)) {
        best = std::max(best, gain(s, w));
    }
    return std::max(best, gain(s, 0.0));
}

}  // namespace

TEST_CASE("recover_continuous special cases") {
    const SystemTriple I(Matrix::Identity(2, 2), Matrix::Ones(2, 1), Matrix::Ones(1, 2));
    const ContinuousSystem c = recover_continuous(I, 0.1);
    CHECK(c.F.norm() == 0.0);
    CHECK((c.G - Matrix::Ones(2, 1) / 0.1).norm() < 1e-12);

    const SystemTriple s(Matrix::Constant(1, 1, std::exp(-0.1)), Matrix::Ones(1, 1), Matrix::Ones(1, 1));
    CHECK(recover_continuous(s, 0.1).F(0, 0) == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("discretize and recover_continuous are inverse maps") {
    Rng rng(51);
    for (int t = 0; t < 20; ++t) {
        const ContinuousSystem c = random_continuous(5, 2, 2, rng);
        const ContinuousSystem back = recover_continuous(discretize(c), c.h);
        CHECK((back.F - c.F).norm() <= 1e-9 * c.F.norm());
        CHECK((back.G - c.G).norm() <= 1e-9 * c.G.norm());

        const SystemTriple x = random_point(5, 2, 2, rng);
        const SystemTriple again = discretize(recover_continuous(x, 0.1));
        CHECK((again.A() - x.A()).norm() <= 1e-9 * x.A().norm());
        CHECK((again.B() - x.B()).norm() <= 1e-9 * x.B().norm());
    }
}

TEST_CASE("Lyapunov solvers agree and satisfy the equation") {
    Rng rng(52);
    const ContinuousSystem c = random_continuous(6, 2, 1, rng);
    const Matrix W = c.G * c.G.transpose();
    const Matrix P = lyapunov(c.F, W);
    CHECK((c.F * P + P * c.F.transpose() + W).norm() < 1e-12 * W.norm());
    CHECK((P - lyapunov_kronecker(c.F, W)).norm() < 1e-10 * P.norm());
    // non-symmetric F goes through the Kronecker path
    const Matrix Fn = c.F + 0.1 * gaussian(6, 6, rng);
    const Matrix Pn = lyapunov(Fn, W);
    CHECK((Fn * Pn + Pn * Fn.transpose() + W).norm() < 1e-10 * W.norm());
}

TEST_CASE("H2 norm of 1/(s+1)") {
    CHECK(h2_norm(first_order()) == doctest::Approx(0.7071067811865476).epsilon(1e-10));
}

TEST_CASE("H-infinity norm of 1/(s+1)") {
    CHECK(hinf_norm(first_order()) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("H-infinity bisection agrees with a dense frequency sweep") {
    Rng rng(53);
    for (int t = 0; t < 10; ++t) {
        const ContinuousSystem c = random_continuous(6, 2, 2, rng);
        const double g = hinf_norm(c);
        const double s = sweep(c);
        CHECK(std::abs(g - s) <= 1e-3 * s);
        CHECK(g >= s * (1.0 - 1e-6));
    }
}

TEST_CASE("H-infinity of a resonant difference system") {
    // T - T_est has an interior peak that a coarse grid misses.
    ContinuousSystem a;
    a.F = Matrix::Zero(2, 2);
    a.F.diagonal() << -0.01, -100.0;
    a.G = Matrix::Ones(2, 1);
    a.C = Matrix::Ones(1, 2);
    a.h = 0.1;
    ContinuousSystem b = a;
    b.F(0, 0) = -0.012;
    const ContinuousSystem d = difference_system(a, b);
    const double g = hinf_norm(d);
    CHECK(std::abs(g - sweep(d, 20000)) <= 1e-3 * g);
}

TEST_CASE("relative errors vanish for identical and orthogonally equivalent models") {
    Rng rng(54);
    const ContinuousSystem c = random_continuous(4, 2, 2, rng);
    CHECK(h2_relative(c, c) < 1e-12);
    CHECK(hinf_relative(c, c) < 1e-12);
    const Matrix U = random_orthogonal(4, rng);
    ContinuousSystem u = c;
    u.F = sym(U.transpose() * c.F * U);
    u.G = U.transpose() * c.G;
    u.C = c.C * U;
    // the difference norm is a square root of a cancelled sum, so ~sqrt(eps)
    CHECK(h2_relative(c, u) < 1e-7);
    CHECK(hinf_relative(c, u) < 1e-9);
    ContinuousSystem e = c;
    e.G *= 1.1;
    CHECK(h2_relative(c, e) == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(hinf_relative(c, e) == doctest::Approx(0.1).epsilon(1e-5));
}

TEST_CASE("norms are undefined for unstable systems") {
    ContinuousSystem s = first_order();
    s.F(0, 0) = 0.5;
    CHECK_THROWS_AS(h2_norm(s), DomainError);
    CHECK_THROWS_AS(hinf_norm(s), DomainError);
    CHECK_THROWS_AS(h2_relative(first_order(), s), DomainError);
}

TEST_CASE("Bode data of 1/(s+1)") {
    const BodeTable t = bode_data(first_order(), {1.0, 1e-8});
    REQUIRE(t.channels.size() == 1);
    CHECK(t.channels[0].magnitude_db[0] == doctest::Approx(-3.0102999566398125).epsilon(1e-12));
    CHECK(t.channels[0].phase_deg[0] == doctest::Approx(-45.0).epsilon(1e-12));
    CHECK(t.channels[0].magnitude_db[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("Bode magnitudes match direct complex evaluation") {
    Rng rng(55);
    const ContinuousSystem c = random_continuous(5, 2, 3, rng);
    const std::vector<double> grid = logspace(-2.0, 2.0, 17);
    const BodeTable t = bode_data(c, grid);
    REQUIRE(t.channels.size() == 6);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        // T(jw) = sum_i c_i g_i^T / (jw - lambda_i) in the eigenbasis
        const SymEig e = sym_eig(c.F);
        const Matrix cq = c.C * e.vectors, qg = e.vectors.transpose() * c.G;
        for (const auto& ch : t.channels) {
            std::complex<double> z = 0.0;
            for (Eigen::Index i = 0; i < 5; ++i) {
                z += cq(ch.output, i) * qg(i, ch.input) / (std::complex<double>(0.0, grid[k]) - e.values(i));
            }
            CHECK(std::abs(ch.magnitude_db[k] - 20.0 * std::log10(std::abs(z))) < 1e-10);
        }
    }
    // DC gain -C F^-1 G
    const BodeTable dc = bode_data(c, {0.0});
    const Matrix T0 = -c.C * c.F.inverse() * c.G;
    CHECK(std::abs(dc.channels[0].magnitude_db[0] - 20.0 * std::log10(std::abs(T0(0, 0)))) < 1e-10);
}

TEST_CASE("Bode flags a pole on the imaginary axis") {
    ContinuousSystem s = first_order();
    s.F(0, 0) = 0.0;
    const BodeTable t = bode_data(s, {0.0, 1.0});
    CHECK(std::isinf(t.channels[0].magnitude_db[0]));
    CHECK(std::isfinite(t.channels[0].magnitude_db[1]));
}

TEST_CASE("stability report") {
    Matrix A = Matrix::Zero(2, 2);
    A.diagonal() << 0.5, 0.9;
    const SystemTriple x(A, Matrix::Ones(2, 1), Matrix::Ones(1, 2));
    const StabilityReport r = stability_report(x, 0.1);
    CHECK(r.stable);
    CHECK(r.lambda_max_f == doctest::Approx(-1.0536051565782627).epsilon(1e-13));
    A(1, 1) = 1.01;
    CHECK_FALSE(stability_report(SystemTriple(A, Matrix::Ones(2, 1), Matrix::Ones(1, 2)), 0.1).stable);
}

TEST_CASE("evaluate skips norms for unstable estimates") {
    Rng rng(56);
    ContinuousSystem truth = random_continuous(3, 1, 1, rng);
    const SystemTriple td = discretize(truth);
    IODataset d;
    d.u = gaussian(1, 50, rng);
    d.y = simulate(td, d.u).y;
    const EvalReport ok = evaluate(truth, td, d, 20.0);
    CHECK(ok.stable);
    CHECK(ok.g2.value() < 1e-9);
    CHECK(ok.f_value < 1e-20);
    Matrix A = td.A();
    A += 0.5 * Matrix::Identity(3, 3);
    const EvalReport bad = evaluate(truth, SystemTriple(A, td.B(), td.C()), d, 20.0);
    CHECK_FALSE(bad.stable);
    CHECK_FALSE(bad.g2.has_value());
    CHECK(bad.lambda_max_est > 0.0);
}
