#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"

using namespace waveforge;

namespace {

std::vector<cplx> random_poles(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> re(-3.0, -0.2), im(0.1, 2.0);
    std::vector<cplx> p;
    while (static_cast<int>(p.size()) < n) {
        if (n - static_cast<int>(p.size()) >= 2 && rng() % 2) {
            const cplx z(re(rng), im(rng));
            p.push_back(z);
            p.push_back(std::conj(z));
        } else {
            p.push_back(re(rng));
        }
    }
    return p;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int r, int c) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    return m;
}

}  // namespace

TEST_CASE("kalman: examples") {
    CHECK(kalman_check(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1)).controllable);
    const KalmanReport r = kalman_check(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 0));
    CHECK_FALSE(r.controllable);
    CHECK(r.rank == 1);
    const auto& g = fixtures::cubic_design().gains;
    CHECK(g.kalman.controllable);
    CHECK(g.kalman.rank == 3);
    CHECK(g.kalman.min_pivot > 1e-10);
}

TEST_CASE("kalman: invariant under similarity") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        Eigen::MatrixXd A = random_matrix(rng, n, n);
        Eigen::VectorXd B = random_matrix(rng, n, 1);
        if (trial % 3 == 0) {
            // uncontrollable: decoupled last state
            A.row(n - 1).setZero();
            A.col(n - 1).setZero();
            A(n - 1, n - 1) = 0.7;
            B[n - 1] = 0.0;
        }
        Eigen::MatrixXd T = random_matrix(rng, n, n) + 3.0 * Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd Ti = T.inverse();
        const KalmanReport r0 = kalman_check(A, B);
        const KalmanReport r1 = kalman_check(T * A * Ti, T * B);
        CHECK(r0.rank == r1.rank);
        CHECK(r0.controllable == r1.controllable);
        CHECK(r0.controllable == (trial % 3 != 0));
    }
}

TEST_CASE("placement: examples") {
    Eigen::MatrixXd A(2, 2);
    A << 0, 1, 0, 0;
    const Eigen::RowVectorXd K = place_poles(A, Eigen::Vector2d(0, 1), {-1.0, -1.0});
    CHECK(K[0] == doctest::Approx(-1.0));
    CHECK(K[1] == doctest::Approx(-2.0));
    const Eigen::MatrixXd AK = A + Eigen::Vector2d(0, 1) * K;
    CHECK(std::abs(charpoly_eval(AK, cplx(0, 1)) - cplx(0, 2)) < 1e-14);  // s^2 + 2s + 1 at s = i

    const Eigen::RowVectorXd k1 = place_poles(Eigen::MatrixXd::Constant(1, 1, 0.4), Eigen::VectorXd::Ones(1), {-2.0});
    CHECK(k1[0] == doctest::Approx(-2.4));

    const auto& g = fixtures::cubic_design().gains;
    for (const cplx p : {-0.5, -1.0, -1.5}) CHECK(std::abs(charpoly_eval(g.A_K, p)) < 1e-8);
    CHECK(g.placement_residual < 1e-8);
}

TEST_CASE("placement: random controllable pairs") {
    std::mt19937_64 rng(2024);
    for (int seed = 0; seed < 100; ++seed) {
        const int n = 1 + static_cast<int>(rng() % 6);
        const Eigen::MatrixXd A = random_matrix(rng, n, n);
        const Eigen::VectorXd B = random_matrix(rng, n, 1);
        if (!kalman_check(A, B).controllable) continue;
        const auto poles = random_poles(rng, n);
        const Eigen::RowVectorXd K = place_poles(A, B, poles);
        const double qn = real_poly_from_roots(poles).cwiseAbs().maxCoeff();
        for (const cplx p : poles) CHECK(std::abs(charpoly_eval(A + B * K, p)) < 1e-6 * qn);
    }
}

TEST_CASE("placement: uncontrollable pair") {
    CHECK_THROWS(place_poles(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 0), {-1.0, -2.0}));
}

TEST_CASE("real polynomial from roots") {
    const Eigen::VectorXd q = real_poly_from_roots({cplx(-1, 2), cplx(-1, -2), -3.0});
    // (s^2 + 2s + 5)(s + 3) = s^3 + 5 s^2 + 11 s + 15
    REQUIRE(q.size() == 4);
    CHECK(q[0] == doctest::Approx(15.0));
    CHECK(q[1] == doctest::Approx(11.0));
    CHECK(q[2] == doctest::Approx(5.0));
    CHECK(q[3] == 1.0);
    CHECK_THROWS(real_poly_from_roots({cplx(-1, 2), -3.0}));
}

TEST_CASE("design: cubic pipeline") {
    const auto& g = fixtures::cubic_design().gains;
    CHECK(g.A_K.rows() == 3);
    CHECK(g.lyapunov_residual < 1e-10);
    CHECK(norm_inf(g.A_K.transpose() * g.P + g.P * g.A_K + Eigen::MatrixXd::Identity(3, 3)) < 1e-10);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(g.P).info() == Eigen::Success);
    std::mt19937_64 rng(8);
    for (int i = 0; i < 100; ++i) {
        const Eigen::VectorXd x = random_matrix(rng, 3, 1);
        CHECK(x.dot(g.P * x) >= 1e-12 * x.squaredNorm());
    }
}

TEST_CASE("design: invalid pole lists") {
    const ReducedModel& m = fixtures::cubic_design().model;
    CHECK_THROWS_AS(design_controller(m, {cplx(-1, 1), -1.0, -2.0}), ControlDesignError);
    CHECK_THROWS_AS(design_controller(m, {0.0, -1.0, -2.0}), ControlDesignError);
    CHECK_THROWS_AS(design_controller(m, {-1.0, -2.0}), ControlDesignError);
    try {
        design_controller(m, {0.1, -1.0, -2.0});
        FAIL("expected ControlDesignError");
    } catch (const ControlDesignError& e) {
        CHECK(e.stage() == "poles");
    }
}
