#include <algorithm>
#include <cmath>

#include "waveforge/simulate.hpp"

namespace waveforge {

namespace {

// Second-order derivative on a uniform grid, one-sided at both ends.
Eigen::VectorXd derivative(const Eigen::VectorXd& y, double h) {
    const Eigen::Index n = y.size();
    Eigen::VectorXd d(n);
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
    for (Eigen::Index i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
    return d;
}

Eigen::VectorXd subsample(const Eigen::VectorXd& fine, int refine, Eigen::Index n) {
    Eigen::VectorXd c(n);
    for (Eigen::Index i = 0; i < n; ++i) c[i] = fine[i * refine];
    return c;
}

// Piecewise-linear transfer of coarse samples to the fine grid.
Eigen::VectorXd prolong(const Eigen::VectorXd& coarse, int refine) {
    const Eigen::Index n = coarse.size();
    Eigen::VectorXd f((n - 1) * refine + 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        for (int j = 0; j < refine; ++j) {
            const double w = static_cast<double>(j) / refine;
            f[i * refine + j] = (1.0 - w) * coarse[i] + w * coarse[i + 1];
        }
    }
    f[f.size() - 1] = coarse[n - 1];
    return f;
}

// Projection of W onto the duals the controller consumes.
struct Projector {
    int n0, n_tail;
    Eigen::MatrixXd d_block, f_block;
    Eigen::MatrixXcd d_tail, f_tail;
    Eigen::VectorXcd trace_over_lambda;

    explicit Projector(const ModeBasis& basis) : n0(basis.n0), n_tail(basis.n_modes - basis.n0) {
        const int nb = 2 * n0 + 1;
        const int n = basis.grid.size();
        const Eigen::VectorXd& w = basis.grid.simpson_weights();
        d_block.resize(nb, n);
        f_block.resize(nb, n);
        for (int j = 0; j < nb; ++j) {
            const BasisVector& e = basis.block[static_cast<std::size_t>(j)];
            d_block.row(j) = e.df1.real().cwiseProduct(w).transpose();
            f_block.row(j) = e.f2.real().cwiseProduct(w).transpose();
        }
        d_tail.resize(n_tail, n);
        f_tail.resize(n_tail, n);
        trace_over_lambda.resize(n_tail);
        for (int i = 0; i < n_tail; ++i) {
            const Mode& m = basis.mode(n0 + 1 + i);
            d_tail.row(i) = m.df1.conjugate().cwiseProduct(w.cast<cplx>()).transpose();
            f_tail.row(i) = m.f2.conjugate().cwiseProduct(w.cast<cplx>()).transpose();
            trace_over_lambda[i] = m.trace0 / m.lambda;
        }
    }
};

}  // namespace

FdmOptions fdm_options(const ProblemConfig& config) {
    FdmOptions o;
    o.T = config.T;
    o.refine = config.fdm_refine;
    o.cfl = config.fdm_cfl;
    const double h = config.L / ((config.grid_points - 1) * std::max(1, config.fdm_refine));
    o.record_every = std::max(1, static_cast<int>(std::lround(config.dt * config.record_every / (config.fdm_cfl * h))));
    o.snapshots = config.snapshots;
    return o;
}

SimulationTrace run_fdm_oracle(const ProblemConfig& config, const SteadyState& ss, const ModeBasis& basis,
                               const ReducedModel& model, const ControllerGains& gains, const FdmOptions& options) {
    const Grid& coarse = basis.grid;
    const int n = coarse.size();
    const int refine = options.refine;
    if (refine < 1) throw Error("run_fdm_oracle: refinement must be >= 1");
    if (!(options.cfl > 0.0) || options.cfl > 0.9) {
        throw Error("run_fdm_oracle: CFL number " + std::to_string(options.cfl) + " outside (0, 0.9]");
    }
    if (model.dim() != gains.K.size()) throw Error("run_fdm_oracle: gain does not match the reduced model");
    const double L = coarse.length();
    const double alpha = config.alpha;
    const Nonlinearity& f = config.f;
    const Grid fine((n - 1) * refine + 1, L);
    const int M = fine.size() - 1;
    const double h = fine.spacing();
    const long n_steps = static_cast<long>(std::ceil(options.T / (options.cfl * h) - 1e-9));
    const double dt = options.T / static_cast<double>(n_steps);
    const double c = alpha * dt / h;
    const Eigen::VectorXd& xf = fine.x();

    const SteadyState fine_ss = refine == 1 ? ss : compute_steady_state(f, ss.z_e, fine, config.substeps);
    const Eigen::VectorXd& ye = fine_ss.y;
    const double u_e = ss.u_e;

    StateFunction w0;
    if (config.ic.kind == InitialCondition::Kind::RandomModes) {
        const StateFunction wc = reconstruct(basis, initial_coefficients(config, basis));
        w0 = {prolong(wc.w1, refine), prolong(wc.dw1, refine), prolong(wc.w2, refine)};
    } else {
        w0 = initial_deviation(config.ic, fine, alpha);
    }

    const Projector proj(basis);
    const int m = model.dim();
    const int nb = 2 * proj.n0 + 1;
    const double M_lyap = 1.0 + 3.0 * (1.0 / (alpha * alpha * L) + L / (3.0 * alpha * alpha) * gains.K.squaredNorm()) /
                                    basis.gram_min;

    Eigen::VectorXd y = ye + w0.w1;
    y[0] = 0.0;
    const Eigen::VectorXd yt0 = w0.w2 + (config.v0 / (alpha * L)) * xf;
    Eigen::VectorXd y_prev = y, y_next(M + 1), yt = yt0;
    double v = config.v0;
    double v_d_prev = 0.0;
    double zeta = config.zeta0;
    auto neumann0 = [h](const Eigen::VectorXd& s) { return (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h); };
    double z = neumann0(y);

    SimulationTrace trace;
    trace.lyapunov_M = M_lyap;
    std::vector<long> snaps;
    if (options.snapshots == 1) snaps.push_back(0);
    for (int j = 0; options.snapshots > 1 && j < options.snapshots; ++j) {
        snaps.push_back(std::lround(static_cast<double>(j) * static_cast<double>(n_steps) / (options.snapshots - 1)));
    }
    std::size_t next_snap = 0;

    for (long step = 0;; ++step) {
        const double t = static_cast<double>(step) * dt;
        const double dt2 = dt * dt;
        if (step == 0) {
            for (int i = 1; i < M; ++i) {
                const double acc = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h) + f.value(y[i]);
                y_next[i] = y[i] + dt * yt0[i] + 0.5 * dt2 * acc;
            }
            const double acc = (2.0 * y[M - 1] - 2.0 * y[M]) / (h * h) +
                               2.0 * (u_e - alpha * yt0[M] + v) / h + f.value(y[M]);
            y_next[M] = y[M] + dt * yt0[M] + 0.5 * dt2 * acc;
        } else {
            for (int i = 1; i < M; ++i) {
                y_next[i] = 2.0 * y[i] - y_prev[i] +
                            dt2 * ((y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h) + f.value(y[i]));
            }
            // Ghost node from y_x(L) = u_e - alpha y_t(L) + v, with y_t(L) centred in time.
            y_next[M] = (2.0 * y[M] - y_prev[M] +
                         dt2 * ((2.0 * y[M - 1] - 2.0 * y[M]) / (h * h) + 2.0 * (u_e + v) / h + f.value(y[M])) +
                         c * y_prev[M]) /
                        (1.0 + c);
            yt = (y_next - y_prev) / (2.0 * dt);
        }
        y_next[0] = 0.0;

        // Modal coordinates of W = (y - y_e, y_t - x v / (alpha L)).
        const Eigen::VectorXd dev = y - ye;
        const Eigen::VectorXd ddev = derivative(dev, h);
        const Eigen::VectorXd w2 = yt - (v / (alpha * L)) * xf;
        const Eigen::VectorXd dd_c = subsample(ddev, refine, n);
        const Eigen::VectorXd w2_c = subsample(w2, refine, n);
        const Eigen::VectorXd block = proj.d_block * dd_c + proj.f_block * w2_c;
        const Eigen::VectorXcd tail = proj.d_tail * dd_c.cast<cplx>() + proj.f_tail * w2_c.cast<cplx>();
        double shift = 0.0;
        for (int i = 0; i < proj.n_tail; ++i) shift += 2.0 * (proj.trace_over_lambda[i] * tail[i]).real();
        Eigen::VectorXd X(m);
        X[0] = v;
        X.segment(1, nb) = block;
        X[m - 1] = zeta - shift;
        const double v_d = gains.K.dot(X);

        if (step % options.record_every == 0 || step == n_steps) {
            TraceRecord r{};
            r.t = t;
            r.z = z;
            r.u = u_e - alpha * yt[M] + v;
            r.v = v;
            r.v_d = v_d;
            r.xi = X[m - 1];
            r.zeta = zeta;
            r.V = M_lyap * X.dot(gains.P * X) + tail.squaredNorm();
            r.E = quad_simpson(fine, Eigen::VectorXd(yt.cwiseAbs2() + ddev.cwiseAbs2()));
            r.normW = std::sqrt(quad_simpson(fine, Eigen::VectorXd(ddev.cwiseAbs2() + w2.cwiseAbs2())));
            r.w1_inf = dev.cwiseAbs().maxCoeff();
            trace.records.push_back(r);
        }
        while (next_snap < snaps.size() && snaps[next_snap] == step) {
            trace.snapshots.push_back({t, coarse.x(), subsample(y, refine, n), subsample(yt, refine, n)});
            ++next_snap;
        }
        if (step == n_steps) break;

        if (!y_next.allFinite() || y_next.cwiseAbs().maxCoeff() > 1e6) {
            trace.diverged = true;
            char buf[96];
            std::snprintf(buf, sizeof buf, "finite-difference state diverged at t = %.6g", t + dt);
            trace.failure = buf;
            break;
        }
        const double z_next = neumann0(y_next);
        zeta += 0.5 * dt * ((z - ss.z_e - config.zr(t)) + (z_next - ss.z_e - config.zr(t + dt)));
        v += dt * (step == 0 ? v_d : 1.5 * v_d - 0.5 * v_d_prev);
        v_d_prev = v_d;
        z = z_next;
        y_prev.swap(y);
        y.swap(y_next);
    }
    return trace;
}

SimulationTrace run_fdm_oracle(const ProblemConfig& config, const SteadyState& ss, const ModeBasis& basis,
                               const ReducedModel& model, const ControllerGains& gains) {
    return run_fdm_oracle(config, ss, basis, model, gains, fdm_options(config));
}

}  // namespace waveforge
