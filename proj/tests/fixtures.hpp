#pragma once

#include "waveforge/pipeline.hpp"

namespace fixtures {

// f = y^3, z_e = 1.5, alpha = 1.1, L = 1, N = 10, poles -0.5, -1, -1.5.
inline waveforge::ProblemConfig cubic_config(int grid_points = 1001) {
    waveforge::ProblemConfig c;
    c.f = waveforge::Nonlinearity({0, 0, 0, 1});
    c.z_e = 1.5;
    c.grid_points = grid_points;
    c.zr.plateaus = {{10.0, 0.1}};
    c.zr.tau = 1.0;
    return c;
}

inline waveforge::ProblemConfig linear_config(int grid_points = 1001) {
    waveforge::ProblemConfig c;
    c.f = waveforge::Nonlinearity({0.0});
    c.z_e = 1.5;
    c.grid_points = grid_points;
    return c;
}

inline const waveforge::Design& cubic_design() {
    static const waveforge::Design d = waveforge::run_design(cubic_config());
    return d;
}

inline const waveforge::Design& linear_design() {
    static const waveforge::Design d = waveforge::run_design(linear_config());
    return d;
}

}  // namespace fixtures
