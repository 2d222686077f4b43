#pragma once

#include <complex>
#include <string>
#include <vector>

#include "waveforge/numerics.hpp"

namespace waveforge {

/// h = L / (k + 1/2).
double critical_delay(double L, int k);

/// The positive root of e^{gamma h} = alpha coth(gamma L), by bisection.
double solve_gamma(double alpha, double L, double h);

/// e^{lambda h} + alpha tanh(lambda L).
cplx delay_characteristic(double alpha, double L, double h, cplx lambda);

struct DelayRoot {
    int n = 0;
    cplx lambda{};
    double residual = 0.0;
};

struct DelayRootResult {
    int k = 0;
    double h = 0.0;
    double gamma = 0.0;
    std::vector<DelayRoot> roots;
};

/// lambda_n = gamma + i (k + 1/2)(4n + 1) pi / L for n in [n_min, n_max].
DelayRootResult unstable_roots(double alpha, double L, int k, int n_min, int n_max);

/// sqrt(lambda^2 + beta) on the branch lambda exp(Log(1 + beta/lambda^2)/2).
cplx principal_sqrt_shift(cplx lambda, double beta);

/// s cosh(s L) + alpha lambda e^{-lambda h} sinh(s L), s = sqrt(lambda^2 + beta).
cplx beta_characteristic(double alpha, double L, double h, double beta, cplx lambda);

struct BetaRoot {
    int n = 0;
    cplx lambda0{};
    cplx lambda{};
    double residual = 0.0;
    double drift = 0.0;  // |lambda - lambda0|
    bool unstable = true;
    std::string warning;
};

/// Secant refinement of the beta = 0 root lambda_n on the perturbed equation.
BetaRoot beta_refined_root(double alpha, double L, int k, double beta, int n);
BetaRoot beta_refined_root(double alpha, double L, int k, double beta, int n, cplx guess);

}  // namespace waveforge
