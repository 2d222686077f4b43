#pragma once

#include <Eigen/Dense>

#include "waveforge/model.hpp"
#include "waveforge/numerics.hpp"

namespace waveforge {

/// Steady profile y_e with y_e(0) = 0 and y_e'(0) = z_e, sampled on a grid.
struct SteadyState {
    Grid grid;
    Eigen::VectorXd y;
    Eigen::VectorXd dy;
    double z_e = 0.0;
    double u_e = 0.0;
    double conservation_residual = 0.0;
};

/// Shoots y'' + f(y) = 0 from x = 0 with `substeps` RK4 steps per grid
/// interval. Throws BlowUpError if |y| or |y'| exceeds 1e6 before x = L.
SteadyState compute_steady_state(const Nonlinearity& f, double z_e, const Grid& grid, int substeps);
SteadyState compute_steady_state(const ProblemConfig& config);

/// max over the grid of |y'^2 + 2F(y) - z_e^2|.
double check_conservation(const SteadyState& ss, const Nonlinearity& f);

}  // namespace waveforge
