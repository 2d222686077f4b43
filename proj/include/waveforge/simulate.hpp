#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "waveforge/control.hpp"
#include "waveforge/model.hpp"
#include "waveforge/reduction.hpp"
#include "waveforge/spectrum.hpp"
#include "waveforge/steady.hpp"

namespace waveforge {

/// r = w1^2 int_0^1 (1-s) f''(y_e + s w1) ds, Gauss-Legendre in s.
Eigen::VectorXd residual_field(const SteadyState& ss, const Eigen::VectorXd& w1, const Nonlinearity& f);
Eigen::VectorXd residual_field(const Eigen::VectorXd& y_e, const Eigen::VectorXd& w1, const Nonlinearity& f,
                               const GaussRule& rule);
/// Smallest Gauss-Legendre order integrating the residual exactly.
int residual_rule_order(const Nonlinearity& f);

struct TraceRecord {
    double t, z, u, v, v_d, xi, zeta, V, E, normW, w1_inf;
};

struct Snapshot {
    double t;
    Eigen::VectorXd x, y, y_t;
};

struct SimulationTrace {
    std::vector<TraceRecord> records;
    std::vector<Snapshot> snapshots;
    bool diverged = false;
    std::string failure;
    double lyapunov_M = 0.0;
};

/// Everything the closed-loop right-hand side needs, precomputed once.
/// Packed state: [X (2n0+3); Re w_k, Im w_k for k = n0+1..N].
class ClosedLoop {
public:
    ClosedLoop(const ModeBasis& basis, const ReducedModel& model, const ControllerGains& gains,
               const SteadyState& ss, const Nonlinearity& f, const ReferenceSignal& zr);

    int dim() const noexcept { return m_ + 2 * n_tail_; }
    int x_dim() const noexcept { return m_; }

    Eigen::VectorXd rhs(double t, const Eigen::VectorXd& state) const;
    Eigen::VectorXd operator()(double t, const Eigen::VectorXd& state) const { return rhs(t, state); }

    /// Modal coefficients (index k + N) carried by a packed state.
    Eigen::VectorXcd coefficients(const Eigen::VectorXd& state) const;
    Eigen::VectorXd pack(double v, const Eigen::VectorXcd& coeffs, double xi) const;

    StateFunction deviation(const Eigen::VectorXd& state) const;
    TraceRecord diagnostics(double t, const Eigen::VectorXd& state) const;
    Snapshot snapshot(double t, const Eigen::VectorXd& state) const;
    double lyapunov(const Eigen::VectorXd& state) const;
    double lyapunov_M() const noexcept { return M_; }

private:
    const ModeBasis& basis_;
    const ControllerGains& gains_;
    const SteadyState& ss_;
    const Nonlinearity& f_;
    const ReferenceSignal& zr_;
    int n0_, N_, m_, n_tail_;
    bool affine_;
    GaussRule rule_;
    // Real synthesis matrices: sample = Phi * packed modal coordinates.
    Eigen::MatrixXd phi1_, phid_, phi2_;
    // Projection of (0, r) onto the duals of the block and of k > n0.
    Eigen::MatrixXd psi_block_;
    Eigen::MatrixXcd psi_tail_;
    Eigen::VectorXcd lambda_, a_, b_, trace_over_lambda_, trace0_;
    double M_;
};

/// Deviation W(0) described by the initial-condition descriptor.
StateFunction initial_deviation(const InitialCondition& ic, const Grid& grid, double alpha);

/// Modal coefficients of W(0): projected from the descriptor, or drawn
/// uniformly in [-scale, scale] (conjugate-symmetric) from `seed`.
Eigen::VectorXcd initial_coefficients(const ProblemConfig& config, const ModeBasis& basis);

/// Modal initial state: (X(0), tail(0)) packed for the closed loop.
Eigen::VectorXd initial_state(const ProblemConfig& config, const ModeBasis& basis, const ClosedLoop& loop);

struct SimulationOptions {
    double dt = 1e-3;
    double T = 40.0;
    int record_every = 1;
    int snapshots = 10;
};

SimulationOptions simulation_options(const ProblemConfig& config);

SimulationTrace run_simulation(const ClosedLoop& loop, const Eigen::VectorXd& x0, const SimulationOptions& options);
SimulationTrace run_simulation(const ProblemConfig& config, const SteadyState& ss, const ModeBasis& basis,
                               const ReducedModel& model, const ControllerGains& gains);

/// Least-squares slope of log(values) against t over samples with
/// values > floor, restricted to [t_from, t_to].
double log_slope(const std::vector<double>& t, const std::vector<double>& values, double t_from, double t_to,
                 double floor = 1e-14);

/// kappa_hat = -slope(log V)/2 over [t_from, t_to].
double estimate_decay_rate(const SimulationTrace& trace, double t_from = 0.0,
                           double t_to = std::numeric_limits<double>::infinity());

struct FdmOptions {
    double T = 40.0;
    int refine = 1;
    double cfl = 0.5;
    int record_every = 1;  // in FDM steps
    int snapshots = 10;
};

FdmOptions fdm_options(const ProblemConfig& config);

/// Leapfrog on y_tt = y_xx + f(y) with the closed-loop boundary input.
SimulationTrace run_fdm_oracle(const ProblemConfig& config, const SteadyState& ss, const ModeBasis& basis,
                               const ReducedModel& model, const ControllerGains& gains, const FdmOptions& options);
SimulationTrace run_fdm_oracle(const ProblemConfig& config, const SteadyState& ss, const ModeBasis& basis,
                               const ReducedModel& model, const ControllerGains& gains);

struct OracleComparison {
    double max_abs = 0.0;     // max |z_modal - z_fdm| on the FDM record times
    double reference = 0.0;   // max |z_fdm - z_e|
    double relative = 0.0;    // max_abs / reference
};

/// Compares z(t) of two traces, interpolating the first linearly in time.
OracleComparison compare_outputs(const SimulationTrace& modal, const SimulationTrace& fdm, double z_e);

}  // namespace waveforge
