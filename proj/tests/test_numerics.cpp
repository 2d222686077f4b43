#include <doctest.h>

#include <cmath>
#include <random>

#include "waveforge/numerics.hpp"

using namespace waveforge;

namespace {

double rk4_exp_error(long steps) {
    auto field = [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(x); };
    const Eigen::VectorXd x = integrate_rk4(field, Eigen::VectorXd(Eigen::VectorXd::Ones(1)), 0.0, 1.0, steps);
    return std::abs(x[0] - std::exp(1.0));
}

}  // namespace

TEST_CASE("rk4: constant field keeps the state") {
    auto field = [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(Eigen::VectorXd::Zero(x.size())); };
    const Eigen::VectorXd x = integrate_rk4(field, Eigen::VectorXd(Eigen::VectorXd::Ones(1)), 0.0, 7.3, 13);
    CHECK(x[0] == 1.0);
}

TEST_CASE("rk4: exponential growth and decay") {
    CHECK(rk4_exp_error(100) < 1e-8);
    auto decay = [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(-x); };
    const Eigen::VectorXd x = integrate_rk4(decay, Eigen::VectorXd(Eigen::VectorXd::Ones(1)), 0.0, 10.0, 1000);
    CHECK(std::abs(x[0] - std::exp(-10.0)) / std::exp(-10.0) < 1e-9);
}

TEST_CASE("rk4: fourth order") {
    // from 10 steps on the error is in the asymptotic regime
    for (long n : {10L, 20L, 40L, 80L}) {
        CHECK(rk4_exp_error(n) / rk4_exp_error(2 * n) >= 15.0);
    }
}

TEST_CASE("rk4: non-finite state reports the step") {
    auto blow = [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(x.array().square() * 1e200); };
    try {
        integrate_rk4(blow, Eigen::VectorXd(Eigen::VectorXd::Constant(1, 1e200)), 0.0, 1.0, 10);
        FAIL("expected PropagationError");
    } catch (const PropagationError& e) {
        CHECK(e.step() == 0);
    }
    auto zero = [](double, const Eigen::VectorXd& x) { return x; };
    CHECK_THROWS_AS(integrate_rk4(zero, Eigen::VectorXd(Eigen::VectorXd::Ones(1)), 0.0, 1.0, 0), Error);
}

TEST_CASE("simpson: examples") {
    const Grid g(101, 1.0);
    CHECK(quad_simpson(g, Eigen::VectorXd::Ones(101)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(quad_simpson(g, Eigen::VectorXd(g.x().array().cube())) == doctest::Approx(0.25).epsilon(1e-15));
    const Eigen::VectorXd s = (M_PI * g.x().array()).sin();
    CHECK(std::abs(quad_simpson(g, s) - 2.0 / M_PI) < 1e-8);
}

TEST_CASE("simpson: exact on cubics for any odd grid") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + 2 * static_cast<int>(rng() % 200);
        const double L = 0.1 + std::abs(u(rng)) * 3.0;
        const double c0 = u(rng), c1 = u(rng), c2 = u(rng), c3 = u(rng);
        const Grid g(n, L);
        const Eigen::ArrayXd x = g.x().array();
        const Eigen::VectorXd p = c0 + c1 * x + c2 * x.square() + c3 * x.cube();
        const double exact = c0 * L + c1 * L * L / 2 + c2 * std::pow(L, 3) / 3 + c3 * std::pow(L, 4) / 4;
        CHECK(std::abs(quad_simpson(g, p) - exact) < 1e-12 * (1.0 + std::abs(exact)));
    }
}

TEST_CASE("simpson: complex samples and mismatched sizes") {
    const Grid g(5, 2.0);
    const Eigen::VectorXcd s = Eigen::VectorXcd::Constant(5, cplx(1.0, -2.0));
    const cplx v = quad_simpson(g, s);
    CHECK(v.real() == doctest::Approx(2.0));
    CHECK(v.imag() == doctest::Approx(-4.0));
    CHECK_THROWS_AS(quad_simpson(g, Eigen::VectorXd::Ones(4)), Error);
}

TEST_CASE("grid: even point count rejected") {
    CHECK_THROWS_AS(Grid(100, 1.0), Error);
    CHECK_THROWS_AS(Grid(1, 1.0), Error);
    CHECK_THROWS_AS(Grid(11, 0.0), Error);
    const Grid g(11, 2.0);
    CHECK(g.spacing() == doctest::Approx(0.2));
    CHECK(g.x()[10] == 2.0);
}

TEST_CASE("secant: examples") {
    const cplx r1 = find_root_complex([](cplx z) { return z - 2.0; }, 0.0, 1e-12, 50);
    CHECK(std::abs(r1 - 2.0) < 1e-12);
    const cplx r2 = find_root_complex([](cplx z) { return z * z + 1.0; }, cplx(0.1, 0.9), 1e-12, 50);
    CHECK(std::abs(r2 - cplx(0, 1)) < 1e-10);
    const cplx r3 = find_root_complex([](cplx z) { return std::exp(z) - 1.0; }, cplx(0.2, 6.0), 1e-12, 50);
    CHECK(std::abs(r3 - cplx(0, 2 * M_PI)) < 1e-10);
}

TEST_CASE("secant: no convergence carries the last iterate") {
    try {
        find_root_complex([](cplx z) { return z * z + 1.0; }, 0.0, 1e-14, 3, cplx(1e-9, 0.0));
        FAIL("expected NoConvergenceError");
    } catch (const NoConvergenceError& e) {
        CHECK(e.residual() > 1e-14);
        CHECK(std::isfinite(e.last_iterate().real()));
    }
}

TEST_CASE("solve_linear: examples") {
    Eigen::Vector2d b(1, 2);
    CHECK((solve_linear(Eigen::Matrix2d::Identity(), b) - b).norm() == 0.0);
    Eigen::Matrix2d a;
    a << 2, 0, 0, 4;
    const Eigen::VectorXd x = solve_linear(a, Eigen::Vector2d(2, 8));
    CHECK(x[0] == 1.0);
    CHECK(x[1] == 2.0);

    Eigen::MatrixXd h(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) h(i, j) = 1.0 / (i + j + 1);
    const Eigen::VectorXd xh = solve_linear(h, Eigen::VectorXd(h.rowwise().sum()));
    CHECK((xh - Eigen::VectorXd::Ones(4)).cwiseAbs().maxCoeff() < 1e-6);
    const double resid = (h * xh - h.rowwise().sum()).cwiseAbs().maxCoeff();
    CHECK(resid <= 1e-10 * (norm_inf(h) * xh.cwiseAbs().maxCoeff() + h.rowwise().sum().cwiseAbs().maxCoeff()));
}

TEST_CASE("solve_linear: singular and complex") {
    Eigen::Matrix2d s;
    s << 1, 2, 2, 4;
    CHECK_THROWS_AS(solve_linear(s, Eigen::Vector2d(1, 1)), SingularMatrixError);
    Eigen::Matrix2cd c;
    c << cplx(0, 1), 1, 0, 2;
    const Eigen::VectorXcd x = solve_linear(c, Eigen::Vector2cd(cplx(1, 1), 2));
    CHECK(std::abs(x[0] - 1.0) < 1e-15);
    CHECK(std::abs(x[1] - 1.0) < 1e-15);
}

TEST_CASE("rank: examples") {
    CHECK(rank_numeric(Eigen::MatrixXd::Identity(3, 3), 1e-10) == 3);
    CHECK(rank_numeric(Eigen::MatrixXd::Zero(3, 3), 1e-10) == 0);
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 2, 4;
    CHECK(rank_numeric(a, 1e-10) == 1);
}

TEST_CASE("rank: invariant under row permutation") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 6);
        const int r = 1 + static_cast<int>(rng() % n);
        Eigen::MatrixXd u(n, r), v(r, n);
        for (int i = 0; i < u.size(); ++i) u.data()[i] = g(rng);
        for (int i = 0; i < v.size(); ++i) v.data()[i] = g(rng);
        const Eigen::MatrixXd a = u * v;
        Eigen::PermutationMatrix<Eigen::Dynamic> p(n);
        p.setIdentity();
        std::shuffle(p.indices().data(), p.indices().data() + n, rng);
        const int base = rank_numeric(a, 1e-10);
        CHECK(base == r);
        CHECK(rank_numeric(p * a, 1e-10) == base);
    }
}

TEST_CASE("lyapunov: examples") {
    const Eigen::MatrixXd p1 = solve_lyapunov(Eigen::MatrixXd::Constant(1, 1, -1.0));
    CHECK(p1(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    Eigen::MatrixXd d = Eigen::Vector2d(-1, -2).asDiagonal();
    const Eigen::MatrixXd p2 = solve_lyapunov(d);
    CHECK(p2(0, 0) == doctest::Approx(0.5));
    CHECK(p2(1, 1) == doctest::Approx(0.25));
    CHECK(std::abs(p2(0, 1)) < 1e-15);
}

TEST_CASE("lyapunov: symmetric and positive definite for random Hurwitz matrices") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
        // shift until Hurwitz
        const double shift = a.eigenvalues().real().maxCoeff() + 0.5;
        a -= shift * Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd p = solve_lyapunov(a);
        CHECK(p == p.transpose());
        CHECK(norm_inf(a.transpose() * p + p * a + Eigen::MatrixXd::Identity(n, n)) < 1e-10 * (1.0 + norm_inf(p)));
        for (int j = 0; j < 100; ++j) {
            Eigen::VectorXd x(n);
            for (int i = 0; i < n; ++i) x[i] = g(rng);
            CHECK(x.dot(p * x) > 0.0);
        }
    }
}

TEST_CASE("lyapunov: eigenvalues summing to zero are rejected") {
    Eigen::MatrixXd a = Eigen::Vector2d(1, -1).asDiagonal();
    CHECK_THROWS_AS(solve_lyapunov(a), NotHurwitzError);
}

TEST_CASE("charpoly: examples") {
    CHECK(std::abs(charpoly_eval(Eigen::MatrixXd::Zero(1, 1), 0.0)) == 0.0);
    Eigen::MatrixXd d = Eigen::Vector2d(-1, -2).asDiagonal();
    CHECK(std::abs(charpoly_eval(d, -1.0)) == 0.0);
    Eigen::MatrixXd c(2, 2);
    c << 0, 1, -2, -3;
    CHECK(std::abs(charpoly_eval(c, -1.0)) < 1e-15);
    CHECK(std::abs(charpoly_eval(c, cplx(0, 1)) - cplx(1, 3)) < 1e-14);
}

TEST_CASE("gauss-legendre: exact to degree 2n-1 on [0,1]") {
    for (int n = 1; n <= 8; ++n) {
        const GaussRule r = gauss_legendre_unit(n);
        for (int d = 0; d <= 2 * n - 1; ++d) {
            const double q = (r.weights.array() * r.nodes.array().pow(d)).sum();
            CHECK(std::abs(q - 1.0 / (d + 1)) < 1e-14);
        }
    }
}
