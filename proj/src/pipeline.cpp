#include "waveforge/pipeline.hpp"

#include <algorithm>

namespace waveforge {

Design run_design(const ProblemConfig& config) {
    require_valid(config);
    SteadyState ss = compute_steady_state(config);
    ModeBasis basis = build_basis(config, ss);
    const TailConstants tail = tail_constants(basis, config.n_tail);
    ReducedModel model = assemble_reduced_model(basis, tail);
    ControllerGains gains = design_controller(model, config.poles);
    return {std::move(ss), std::move(basis), tail, std::move(model), std::move(gains)};
}

double adjoint_identity_defect(const ModeBasis& basis) {
    double worst = 0.0;
    for (int k = -basis.n_modes; k <= basis.n_modes; ++k) {
        if (k == 0) continue;
        const Mode& m = basis.mode(k);
        worst = std::max(worst, std::abs(m.a + m.lambda * m.b - std::conj(m.traceL) / basis.alpha));
    }
    return worst;
}

double linear_oracle_defect(const ProblemConfig& config) {
    ProblemConfig lin = config;
    lin.f = Nonlinearity({0.0});
    lin.n_tail = lin.n_modes;
    lin.n0.reset();
    const SteadyState ss = compute_steady_state(lin);
    const ModeBasis basis = build_basis(lin, ss);
    double worst = 0.0;
    for (int k = -lin.n_modes; k <= lin.n_modes; ++k) {
        worst = std::max(worst, std::abs(basis.mode(k).lambda - linear_spectrum_closed_form(lin.L, lin.alpha, k)));
    }
    return worst;
}

EquilibriumCheck equilibrium_invariance(const ProblemConfig& config, const Design& design, double T) {
    ProblemConfig eq = config;
    eq.ic.kind = InitialCondition::Kind::Zero;
    eq.zr.plateaus.clear();
    eq.zeta0 = 0.0;
    eq.v0 = 0.0;
    eq.T = T;
    eq.snapshots = 0;
    const SimulationTrace tr = run_simulation(eq, design.ss, design.basis, design.model, design.gains);
    EquilibriumCheck c;
    for (const auto& r : tr.records) {
        c.max_z_dev = std::max(c.max_z_dev, std::abs(r.z - design.ss.z_e));
        c.max_V = std::max(c.max_V, r.V);
    }
    if (tr.diverged) c.max_z_dev = std::numeric_limits<double>::infinity();
    return c;
}

namespace {

CheckResult below(const std::string& name, double value, double threshold, std::string detail = {}) {
    return {name, value < threshold, value, threshold, std::move(detail)};
}

}  // namespace

std::vector<CheckResult> verify_suite(const ProblemConfig& config) {
    std::vector<CheckResult> out;
    const Design d = run_design(config);
    out.push_back(below("steady_conservation", d.ss.conservation_residual, 1e-8));
    out.push_back(below("biorthogonality", max_biorthogonality_defect(d.basis), 1e-6));
    out.push_back(below("linear_oracle", linear_oracle_defect(config), 1e-8));
    out.push_back(below("adjoint_identity", adjoint_identity_defect(d.basis), 1e-6));
    out.push_back({"kalman_rank", d.gains.kalman.controllable, static_cast<double>(d.gains.kalman.rank),
                   static_cast<double>(d.gains.kalman.n), "min relative pivot " + std::to_string(d.gains.kalman.min_pivot)});
    out.push_back(below("placement_residual", d.gains.placement_residual, 1e-8));
    out.push_back(below("lyapunov_residual", d.gains.lyapunov_residual, 1e-10));

    const EquilibriumCheck eq = equilibrium_invariance(config, d, 20.0);
    out.push_back(below("equilibrium_z", eq.max_z_dev, 1e-8));
    out.push_back(below("equilibrium_V", eq.max_V, 1e-12));

    ProblemConfig run = config;
    run.snapshots = 0;
    const SimulationTrace modal = run_simulation(run, d.ss, d.basis, d.model, d.gains);
    const SimulationTrace fdm = run_fdm_oracle(run, d.ss, d.basis, d.model, d.gains);
    if (modal.diverged || fdm.diverged) {
        out.push_back({"modal_vs_fdm", false, std::numeric_limits<double>::infinity(), 0.05,
                       modal.diverged ? modal.failure : fdm.failure});
    } else {
        const OracleComparison cmp = compare_outputs(modal, fdm, d.ss.z_e);
        out.push_back(below("modal_vs_fdm", cmp.relative, 0.05,
                            "max |dz| " + std::to_string(cmp.max_abs) + " over max |z_fdm - z_e| " +
                                std::to_string(cmp.reference)));
    }
    return out;
}

}  // namespace waveforge
