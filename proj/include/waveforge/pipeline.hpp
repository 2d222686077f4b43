#pragma once

#include <string>
#include <vector>

#include "waveforge/control.hpp"
#include "waveforge/model.hpp"
#include "waveforge/reduction.hpp"
#include "waveforge/simulate.hpp"
#include "waveforge/spectrum.hpp"
#include "waveforge/steady.hpp"

namespace waveforge {

/// Every artifact up to the controller, computed in order from one config.
struct Design {
    SteadyState ss;
    ModeBasis basis;
    TailConstants tail;
    ReducedModel model;
    ControllerGains gains;
};

Design run_design(const ProblemConfig& config);

/// max_{1 <= |k| <= N} |a_k + lambda_k b_k - conj(f1_k'(L)) / alpha|.
double adjoint_identity_defect(const ModeBasis& basis);

/// max_{|k| <= N} |lambda_k - mu_k| for the f = 0 problem with the same
/// length, gain, grid and cutoff.
double linear_oracle_defect(const ProblemConfig& config);

struct EquilibriumCheck {
    double max_z_dev = 0.0;
    double max_V = 0.0;
};

/// Closed loop from the steady state itself with z_r = 0 over [0, T].
EquilibriumCheck equilibrium_invariance(const ProblemConfig& config, const Design& design, double T);

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

/// Biorthogonality, linear oracle, adjoint identity, Kalman rank, placement
/// and Lyapunov residuals, equilibrium invariance, and modal-vs-FDM agreement.
std::vector<CheckResult> verify_suite(const ProblemConfig& config);

}  // namespace waveforge
