#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "waveforge/reduction.hpp"

using namespace waveforge;

namespace {

double h_norm(const Grid& g, const StateFunction& w) { return norm_H(g, w); }

StateFunction difference(const StateFunction& a, const StateFunction& b) {
    return {a.w1 - b.w1, a.dw1 - b.dw1, a.w2 - b.w2};
}

}  // namespace

TEST_CASE("inner product: actuation profiles") {
    const Grid g(1001, 1.0);
    const StateFunction a = actuation_a(g, 1.1), b = actuation_b(g, 1.1);
    CHECK(std::abs(inner_product_H(g, a.dw1, a.w2, a.dw1, a.w2) - 1.0 / (1.1 * 1.1)) < 1e-14);
    CHECK(std::abs(inner_product_H(g, b.dw1, b.w2, b.dw1, b.w2) - 1.0 / (3 * 1.1 * 1.1)) < 1e-14);
    CHECK(1.0 / (1.1 * 1.1) == doctest::Approx(0.8264).epsilon(1e-4));
    CHECK(a.w1[0] == 0.0);
}

TEST_CASE("projection: examples") {
    const auto& b = fixtures::cubic_design().basis;
    CHECK(project(b, StateFunction{Eigen::VectorXd::Zero(b.grid.size()), Eigen::VectorXd::Zero(b.grid.size()),
                                   Eigen::VectorXd::Zero(b.grid.size())})
              .cwiseAbs()
              .maxCoeff() == 0.0);
    // slot 0 is a real eigenfunction
    const Eigen::VectorXcd w0 = project(b, slot_function(b, 0));
    for (int k = -b.n_modes; k <= b.n_modes; ++k) {
        CHECK(std::abs(w0[k + b.n_modes] - (k == 0 ? 1.0 : 0.0)) < 1e-8);
    }
    // a complex mode e_j through its real and imaginary parts
    const int j = 4;
    const Mode& m = b.mode(j);
    const StateFunction re{m.e1.real(), m.de1.real(), m.e2.real()};
    const StateFunction im{m.e1.imag(), m.de1.imag(), m.e2.imag()};
    const Eigen::VectorXcd w = project(b, re) + cplx(0, 1) * project(b, im);
    for (int k = -b.n_modes; k <= b.n_modes; ++k) {
        CHECK(std::abs(w[k + b.n_modes] - (k == j ? 1.0 : 0.0)) < 1e-8);
    }
}

TEST_CASE("projection: the ramp initial condition is reconstructed") {
    // The ramp satisfies the boundary condition of the damped operator, so
    // w_k = O(1/k^2) and the truncation error is O(N^-3/2): measured
    // 3.5e-2, 1.3e-2, 4.9e-3 at N = 10, 20, 40.
    double previous = 1.0;
    for (int N : {10, 20, 40}) {
        ProblemConfig c = fixtures::cubic_config();
        c.n_modes = c.n_tail = N;
        const SteadyState ss = compute_steady_state(c);
        const ModeBasis b = build_basis(c, ss);
        const StateFunction w = initial_deviation(InitialCondition{}, b.grid, 1.1);
        const double err = h_norm(b.grid, difference(w, reconstruct(b, project(b, w))));
        if (N == 10) CHECK(err < 0.05);
        if (N == 40) CHECK(err < 1e-2);
        CHECK(err < previous / 2.5);
        previous = err;
    }
}

TEST_CASE("projection: reconstruct then project is the identity on the span") {
    const auto& b = fixtures::cubic_design().basis;
    const int N = b.n_modes;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXcd c(b.size());
        c[N] = u(rng);
        for (int k = 1; k <= N; ++k) {
            if (k <= b.n0) {
                c[N + k] = u(rng);
                c[N - k] = u(rng);
            } else {
                c[N + k] = cplx(u(rng), u(rng));
                c[N - k] = std::conj(c[N + k]);
            }
        }
        const StateFunction w = reconstruct(b, c);
        CHECK((project(b, w) - c).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(neumann_trace_series(b, project(b, w)) == doctest::Approx(w.dw1[0]).epsilon(1e-6));
    }
}

TEST_CASE("ab coefficients: conjugate symmetry and adjoint identity") {
    const auto& b = fixtures::cubic_design().basis;
    for (int k = 1; k <= b.n_modes; ++k) {
        CHECK(std::abs(b.mode(-k).a - std::conj(b.mode(k).a)) < 1e-12);
        CHECK(std::abs(b.mode(-k).b - std::conj(b.mode(k).b)) < 1e-12);
    }
}

TEST_CASE("ab coefficients: decay for f = 0") {
    const auto& b = fixtures::linear_design().basis;
    // least squares fit of log|a_k| against log k over k = 2..10
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int k = 2; k <= 10; ++k) {
        const double x = std::log(k), y = std::log(std::abs(b.mode(k).a));
        sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope <= -0.8);
}

TEST_CASE("tail constants: zeroed tail gives zero") {
    ModeBasis b = fixtures::cubic_design().basis;
    for (auto& m : b.modes) m.a = m.b = 0.0;
    for (auto& t : b.extension) t.a = t.b = 0.0;
    const TailConstants t = tail_constants(b);
    CHECK(t.alpha0 == 0.0);
    CHECK(t.beta0 == 0.0);
    CHECK_THROWS_AS(tail_constants(b, b.n_modes + static_cast<int>(b.extension.size()) + 1), Error);
}

TEST_CASE("tail constants: convergence in the cutoff") {
    ProblemConfig c = fixtures::cubic_config();
    c.n_tail = 160;
    const SteadyState ss = compute_steady_state(c);
    const ModeBasis b = build_basis(c, ss);
    const TailConstants t40 = tail_constants(b, 40);
    CHECK(t40.last_term / std::abs(t40.alpha0) < 1e-2);
    // increments shrink about 4x per doubling; relative change 3.9e-3 from
    // 20 to 40, 1.0e-3 from 40 to 80, 2.6e-4 from 80 to 160
    double previous_step = 1.0;
    for (int n : {20, 40, 80}) {
        const double step = std::abs(tail_constants(b, 2 * n).alpha0 - tail_constants(b, n).alpha0);
        CHECK(step < previous_step / 3.0);
        previous_step = step;
    }
    const double a80 = tail_constants(b, 80).alpha0, a160 = tail_constants(b, 160).alpha0;
    CHECK(std::abs(a160 - a80) / std::abs(a160) < 1e-3);
    // the default cutoff agrees with the explicit one
    CHECK(tail_constants(b, 10).alpha0 == doctest::Approx(fixtures::cubic_design().tail.alpha0).epsilon(1e-12));
}

TEST_CASE("xi change of variable") {
    const auto& b = fixtures::cubic_design().basis;
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(b.size());
    CHECK(xi_from_zeta(b, 0.7, zero) == 0.7);
    const Eigen::VectorXcd w = project(b, initial_deviation(InitialCondition{}, b.grid, 1.1));
    const double xi = xi_from_zeta(b, 0.3, w);
    CHECK(std::abs(zeta_from_xi(b, xi, w) - 0.3) < 1e-12);

    double expect = 0.0;
    for (int k = 1; k <= b.n_modes; ++k) {
        expect -= 2.0 * (b.mode(k).trace0 * w[b.n_modes + k] / b.mode(k).lambda).real();
    }
    const double xi0 = xi_from_zeta(b, 0.0, w);
    CHECK(xi0 == doctest::Approx(expect).epsilon(1e-12));

    const ProblemConfig coarse = fixtures::cubic_config(501);
    const SteadyState ss = compute_steady_state(coarse);
    const ModeBasis bc = build_basis(coarse, ss);
    const Eigen::VectorXcd wc = project(bc, initial_deviation(InitialCondition{}, bc.grid, 1.1));
    CHECK(std::abs(xi_from_zeta(bc, 0.0, wc) - xi0) < 1e-4);
}

TEST_CASE("reduced model: structure for the cubic case") {
    const ReducedModel& r = fixtures::cubic_design().model;
    REQUIRE(r.dim() == 3);
    CHECK(r.B.size() == 3);
    CHECK(r.B[0] == 1.0);
    CHECK(r.A.row(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.A(1, 0) == r.a_vec[0]);
    CHECK(r.B[1] == r.b_vec[0]);
    CHECK(r.A(2, 2) == 0.0);
    CHECK(r.A(1, 2) == 0.0);
    CHECK(r.A.row(2).head(2) == r.L1);
    CHECK(r.L1[0] == r.alpha0);
    CHECK(r.B[2] == r.beta0);
    CHECK(std::abs(r.A0(0, 0) - 0.326) < 5e-3);
    CHECK(std::abs(charpoly_eval(r.A, 0.0)) < 1e-8);
    CHECK(std::abs(charpoly_eval(r.A, r.A0(0, 0))) < 1e-8);
    CHECK(r.imag_residue < 1e-8);
}

TEST_CASE("reduced model: f = 0 block is mu_0") {
    const ReducedModel& r = fixtures::linear_design().model;
    CHECK(r.A0(0, 0) == doctest::Approx(linear_spectrum_closed_form(1.0, 1.1, 0).real()).epsilon(1e-9));
}

TEST_CASE("reduced model: grid refinement 501 -> 1001") {
    const ProblemConfig coarse = fixtures::cubic_config(501);
    const SteadyState ss = compute_steady_state(coarse);
    const ModeBasis b = build_basis(coarse, ss);
    const ReducedModel r = assemble_reduced_model(b, tail_constants(b, coarse.n_tail));
    const ReducedModel& ref = fixtures::cubic_design().model;
    CHECK((r.A - ref.A).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((r.B - ref.B).cwiseAbs().maxCoeff() < 1e-8);
}
