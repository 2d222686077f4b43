#include "waveforge/delay.hpp"

#include <numbers>

namespace waveforge {

double critical_delay(double L, int k) {
    if (k < 0) throw Error("critical_delay: k must be >= 0");
    return L / (k + 0.5);
}

double solve_gamma(double alpha, double L, double h) {
    if (!(alpha > 0.0) || !(h > 0.0) || !(L > 0.0)) throw Error("solve_gamma: alpha, L and h must be positive");
    auto g = [&](double gamma) { return std::exp(gamma * h) - alpha / std::tanh(gamma * L); };
    double lo = 1e-6, hi = 1.0;
    while (g(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e3) {
            throw Error("solve_gamma: no sign change of e^{gamma h} - alpha coth(gamma L) on [1e-6, 1e3]");
        }
    }
    if (g(lo) > 0.0) throw Error("solve_gamma: bracket [1e-6, " + std::to_string(hi) + "] has no sign change");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0 || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * mid) break;
        (gm < 0.0 ? lo : hi) = mid;
    }
    if (!(std::abs(g(mid)) < 1e-12)) {
        throw Error("solve_gamma: bisection stalled with residual " + std::to_string(std::abs(g(mid))));
    }
    return mid;
}

cplx delay_characteristic(double alpha, double L, double h, cplx lambda) {
    return std::exp(lambda * h) + alpha * std::tanh(lambda * L);
}

DelayRootResult unstable_roots(double alpha, double L, int k, int n_min, int n_max) {
    if (n_max < n_min) throw Error("unstable_roots: empty index range");
    DelayRootResult r;
    r.k = k;
    r.h = critical_delay(L, k);
    r.gamma = solve_gamma(alpha, L, r.h);
    for (int n = n_min; n <= n_max; ++n) {
        const cplx lambda(r.gamma, (k + 0.5) * (4.0 * n + 1.0) * std::numbers::pi / L);
        const double res = std::abs(delay_characteristic(alpha, L, r.h, lambda));
        if (!(res < 1e-9)) {
            throw Error("unstable_roots: lambda_" + std::to_string(n) + " misses the characteristic equation by " +
                        std::to_string(res));
        }
        r.roots.push_back({n, lambda, res});
    }
    return r;
}

cplx principal_sqrt_shift(cplx lambda, double beta) {
    if (std::abs(lambda) == 0.0) throw Error("principal_sqrt_shift: lambda = 0");
    return lambda * std::exp(0.5 * std::log(1.0 + beta / (lambda * lambda)));
}

cplx beta_characteristic(double alpha, double L, double h, double beta, cplx lambda) {
    const cplx s = principal_sqrt_shift(lambda, beta);
    return s * std::cosh(s * L) + alpha * lambda * std::exp(-lambda * h) * std::sinh(s * L);
}

BetaRoot beta_refined_root(double alpha, double L, int k, double beta, int n) {
    const double h = critical_delay(L, k);
    const double gamma = solve_gamma(alpha, L, h);
    return beta_refined_root(alpha, L, k, beta, n, cplx(gamma, (k + 0.5) * (4.0 * n + 1.0) * std::numbers::pi / L));
}

BetaRoot beta_refined_root(double alpha, double L, int k, double beta, int n, cplx guess) {
    if (!(std::abs(guess) > std::sqrt(std::abs(beta)))) {
        throw Error("beta_refined_root: |guess| must exceed sqrt|beta| for the principal branch");
    }
    const double h = critical_delay(L, k);
    auto g = [&](cplx lambda) { return beta_characteristic(alpha, L, h, beta, lambda); };
    BetaRoot r;
    r.n = n;
    r.lambda0 = guess;
    r.lambda = find_root_complex(g, guess, 1e-10, 100);
    r.residual = std::abs(g(r.lambda));
    if (!(r.residual < 1e-9)) {
        throw NoConvergenceError("beta_refined_root: residual above 1e-9", r.lambda, r.residual);
    }
    r.drift = std::abs(r.lambda - r.lambda0);
    r.unstable = r.lambda.real() > 0.0;
    if (!r.unstable) r.warning = "refined root has Re lambda <= 0 (outside the unstable strip)";
    return r;
}

}  // namespace waveforge
