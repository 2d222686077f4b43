#include <doctest.h>

#include <cmath>
#include <random>

#include "waveforge/model.hpp"
#include "waveforge/errors.hpp"

using namespace waveforge;
using cplx = std::complex<double>;

namespace {

bool check_passed(const ValidationReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return c.passed;
    FAIL("no check named " << name);
    return false;
}

}  // namespace

TEST_CASE("validate: damping condition") {
    ProblemConfig c;
    c.alpha = 1.1;
    CHECK(damping_rate(1.0, 1.1) == doctest::Approx(0.5 * std::log(1.0 / 21.0)));
    CHECK(damping_rate(1.0, 1.1) == doctest::Approx(-1.52226).epsilon(1e-5));
    CHECK(validate(c).ok());

    c.alpha = 3.0;
    CHECK(damping_rate(1.0, 3.0) == doctest::Approx(-0.3466).epsilon(1e-3));
    CHECK_FALSE(validate(c).ok());

    c.alpha = 0.9;
    const ValidationReport r = validate(c);
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.failures().empty());
    CHECK_THROWS_AS(require_valid(c), ConfigError);
}

TEST_CASE("validate: every violation is listed") {
    ProblemConfig c;
    c.alpha = 0.9;
    c.grid_points = 1000;
    c.poles = {cplx(-1, 1), -1.0, -2.0};
    try {
        require_valid(c);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.problems().size() >= 3);
    }
}

TEST_CASE("validate: n_modes against a manual n0") {
    ProblemConfig c;
    c.n0 = 2;
    c.n_modes = 2;
    c.poles = {-1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0};
    CHECK_FALSE(check_passed(validate(c), "n_modes>=n0+1"));
    c.n_modes = 3;
    c.n_tail = 3;
    CHECK(validate(c).ok());
}

TEST_CASE("validate: pole conjugate closure and stability") {
    ProblemConfig c;
    c.poles = {cplx(-1, 2), cplx(-1, -2), -0.5};
    CHECK(validate(c).ok());
    c.poles = {cplx(-1, 2), cplx(-1, 2), -0.5};
    CHECK_FALSE(validate(c).ok());
    c.poles = {-1.0, 0.0, -0.5};
    CHECK_FALSE(validate(c).ok());
}

TEST_CASE("nonlinearity: examples") {
    const Nonlinearity cubic({0, 0, 0, 1});
    CHECK(f_eval(cubic, 2.0) == 8.0);
    CHECK(f_prime(cubic, 2.0) == 12.0);
    CHECK(f_second(cubic, 2.0) == 12.0);
    CHECK(F_eval(cubic, 2.0) == 4.0);

    const Nonlinearity zero({0.0});
    for (double y : {-3.0, 0.0, 1.7}) {
        CHECK(f_eval(zero, y) == 0.0);
        CHECK(f_prime(zero, y) == 0.0);
        CHECK(f_second(zero, y) == 0.0);
        CHECK(F_eval(zero, y) == 0.0);
    }
    const Nonlinearity neg({0, -1});
    CHECK(f_prime(neg, 0.3) == -1.0);
    CHECK(F_eval(neg, 1.0) == -0.5);
    CHECK(neg.is_affine());
    CHECK_FALSE(cubic.is_affine());
}

TEST_CASE("nonlinearity: F' matches f") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const Nonlinearity f({0.3, -1.2, 0.5, 1.0, -0.25});
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const double y = u(rng);
        const double fd = (F_eval(f, y + h) - F_eval(f, y - h)) / (2 * h);
        CHECK(std::abs(fd - f_eval(f, y)) < 1e-6 * (1.0 + std::abs(f_eval(f, y))));
        const double fd2 = (f_eval(f, y + h) - f_eval(f, y - h)) / (2 * h);
        CHECK(std::abs(fd2 - f_prime(f, y)) < 1e-6 * (1.0 + std::abs(f_prime(f, y))));
    }
}

TEST_CASE("reference: examples") {
    ReferenceSignal none;
    for (double t : {0.0, 3.0, 100.0}) CHECK(zr_eval(none, t) == 0.0);

    ReferenceSignal flat;
    flat.plateaus = {{0.0, 0.1}};
    flat.tau = 0.0;
    CHECK(zr_eval(flat, 5.0) == doctest::Approx(0.1));

    ReferenceSignal step;
    step.plateaus = {{10.0, 0.1}};
    step.tau = 1.0;
    CHECK(zr_eval(step, 5.0) == 0.0);
    CHECK(zr_eval(step, 15.0) == doctest::Approx(0.1 * (1.0 - std::exp(-5.0))).epsilon(1e-14));
}

TEST_CASE("reference: derivative bounded by jump over tau") {
    ReferenceSignal s;
    s.plateaus = {{2.0, 0.3}, {5.0, -0.2}, {9.0, 0.1}};
    s.tau = 0.7;
    const double max_jump = 0.5;
    const double h = 1e-6;
    double worst = 0.0, peak = 0.0;
    for (double t = 0.0; t < 15.0; t += 0.01) {
        worst = std::max(worst, std::abs(zr_eval(s, t + h) - zr_eval(s, t)) / h);
        peak = std::max(peak, std::abs(zr_eval(s, t)));
    }
    CHECK(worst <= max_jump / s.tau * (1.0 + 1e-4));
    CHECK(peak <= 0.3 + 1e-12);
}

TEST_CASE("config: parse a complete file") {
    const std::string text = R"(
[problem]
L = 2
alpha = 1.05
f_coeffs = 0, 0, 0, 1
z_e = 1.5

[discretization]
grid_points = 501
n_modes = 6
n_tail = auto
n0 = auto

[control]
poles = -1+0.5i, -1-0.5i, -2

[simulation]
dt = 2e-3
T = 5
ic = linear:0.1:-0.2
zr_breakpoints = 1:0.1, 3:0
zr_tau = 0.5
seed = 9

[delay]
k = 1, 2
n_max = 4
beta = 0.5
)";
    const ProblemConfig c = parse_config(text);
    CHECK(c.L == 2.0);
    CHECK(c.alpha == 1.05);
    CHECK(c.f.coeffs() == std::vector<double>{0, 0, 0, 1});
    CHECK(c.grid_points == 501);
    CHECK(c.n_modes == 6);
    CHECK(c.n_tail == 6);
    CHECK_FALSE(c.n0.has_value());
    REQUIRE(c.poles.size() == 3);
    CHECK(c.poles[0] == cplx(-1, 0.5));
    CHECK(c.poles[1] == cplx(-1, -0.5));
    CHECK(c.ic.kind == InitialCondition::Kind::Linear);
    CHECK(c.ic.slope2 == -0.2);
    CHECK(c.zr.plateaus.size() == 2);
    CHECK(c.zr.tau == 0.5);
    CHECK(c.seed == 9);
    CHECK(c.delay.k_values == std::vector<int>{1, 2});
    CHECK(c.delay.n_max == 4);
    CHECK(c.delay.beta == 0.5);
}

TEST_CASE("config: malformed and unknown keys are all reported") {
    const std::string text = R"(
[problem]
alpha = abc
colour = blue
[discretization]
n_modes = 1.5
)";
    try {
        parse_config(text);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.problems().size() >= 3);
    }
}

TEST_CASE("config: pole list and initial conditions") {
    const auto p = parse_pole_list("-0.5, -1+2i, -1-2i");
    REQUIRE(p.size() == 3);
    CHECK(p[1] == cplx(-1, 2));
    CHECK_THROWS(parse_pole_list("-1, x"));
    CHECK(InitialCondition::parse("zero").kind == InitialCondition::Kind::Zero);
    CHECK(InitialCondition::parse("ramp:0.1").scale == 0.1);
    CHECK(InitialCondition::parse("random:0.02").kind == InitialCondition::Kind::RandomModes);
    CHECK_THROWS(InitialCondition::parse("sine"));
    const InitialCondition ic = InitialCondition::parse("linear:1:2");
    CHECK(InitialCondition::parse(ic.describe()).slope2 == 2.0);
}
