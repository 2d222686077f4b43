#include "waveforge/steady.hpp"

#include <cmath>
#include <string>

namespace waveforge {

namespace {
constexpr double kBlowUp = 1e6;
}

SteadyState compute_steady_state(const Nonlinearity& f, double z_e, const Grid& grid, int substeps) {
    if (substeps < 1) throw Error("compute_steady_state: substeps must be >= 1");
    const int n = grid.size();
    SteadyState ss{grid, Eigen::VectorXd(n), Eigen::VectorXd(n), z_e, 0.0, 0.0};

    auto field = [&f](double, const Eigen::Vector2d& s) { return Eigen::Vector2d(s[1], -f.value(s[0])); };
    const double h = grid.spacing() / substeps;
    Eigen::Vector2d state(0.0, z_e);
    ss.y[0] = 0.0;
    ss.dy[0] = z_e;
    for (int i = 1; i < n; ++i) {
        for (int s = 0; s < substeps; ++s) {
            const double x = grid.x()[i - 1] + s * h;
            state = rk4_step(field, x, state, h);
            if (!state.allFinite() || state.cwiseAbs().maxCoeff() > kBlowUp) {
                const double at = x + h;
                throw BlowUpError("steady state blows up near x = " + std::to_string(at) +
                                      " (no steady state for this z_e and f on [0, L])",
                                  at);
            }
        }
        ss.y[i] = state[0];
        ss.dy[i] = state[1];
    }
    ss.u_e = ss.dy[n - 1];
    ss.conservation_residual = check_conservation(ss, f);
    return ss;
}

SteadyState compute_steady_state(const ProblemConfig& config) {
    return compute_steady_state(config.f, config.z_e, Grid(config.grid_points, config.L), config.substeps);
}

double check_conservation(const SteadyState& ss, const Nonlinearity& f) {
    double worst = 0.0;
    for (int i = 0; i < ss.grid.size(); ++i) {
        const double r = ss.dy[i] * ss.dy[i] + 2.0 * f.antiderivative(ss.y[i]) - ss.z_e * ss.z_e;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

}  // namespace waveforge
