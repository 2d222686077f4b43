#include "waveforge/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace waveforge {

namespace {

std::string at_time(const char* what, double t) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s at t = %.6g", what, t);
    return buf;
}

std::vector<long> snapshot_steps(long n_steps, int count) {
    std::vector<long> out;
    if (count <= 0) return out;
    if (count == 1) return {0};
    for (int j = 0; j < count; ++j) {
        out.push_back(std::lround(static_cast<double>(j) * static_cast<double>(n_steps) / (count - 1)));
    }
    return out;
}

double lyapunov_constant(const ModeBasis& basis, const ControllerGains& gains) {
    const double a2 = 1.0 / (basis.alpha * basis.alpha * basis.L);
    const double b2 = basis.L / (3.0 * basis.alpha * basis.alpha);
    const double k2 = gains.K.squaredNorm();
    return 1.0 + 3.0 * (a2 + b2 * k2) / basis.gram_min;
}

}  // namespace

int residual_rule_order(const Nonlinearity& f) {
    const int d = f.second_derivative_degree();
    return (d + 2) / 2 + 1;
}

Eigen::VectorXd residual_field(const Eigen::VectorXd& y_e, const Eigen::VectorXd& w1, const Nonlinearity& f,
                               const GaussRule& rule) {
    if (y_e.size() != w1.size()) throw Error("residual_field: size mismatch");
    Eigen::VectorXd r = Eigen::VectorXd::Zero(w1.size());
    if (f.is_affine()) return r;
    for (Eigen::Index i = 0; i < w1.size(); ++i) {
        double s = 0.0;
        for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
            const double node = rule.nodes[q];
            s += rule.weights[q] * (1.0 - node) * f.second_derivative(y_e[i] + node * w1[i]);
        }
        r[i] = w1[i] * w1[i] * s;
    }
    return r;
}

Eigen::VectorXd residual_field(const SteadyState& ss, const Eigen::VectorXd& w1, const Nonlinearity& f) {
    return residual_field(ss.y, w1, f, gauss_legendre_unit(residual_rule_order(f)));
}

ClosedLoop::ClosedLoop(const ModeBasis& basis, const ReducedModel& model, const ControllerGains& gains,
                       const SteadyState& ss, const Nonlinearity& f, const ReferenceSignal& zr)
    : basis_(basis), gains_(gains), ss_(ss), f_(f), zr_(zr) {
    n0_ = basis.n0;
    N_ = basis.n_modes;
    m_ = 2 * n0_ + 3;
    n_tail_ = N_ - n0_;
    if (model.dim() != m_ || gains.K.size() != m_) throw Error("ClosedLoop: reduced model does not match basis");
    if (!(ss.grid == basis.grid)) throw Error("ClosedLoop: steady state and basis grids differ");
    affine_ = f.is_affine();
    rule_ = gauss_legendre_unit(residual_rule_order(f));

    const int n = basis.grid.size();
    const int nb = 2 * n0_ + 1;
    const int nc = nb + 2 * n_tail_;
    phi1_.resize(n, nc);
    phid_.resize(n, nc);
    phi2_.resize(n, nc);
    psi_block_.resize(nb, n);
    psi_tail_.resize(n_tail_, n);
    const Eigen::VectorXd& w = basis.grid.simpson_weights();
    for (int j = 0; j < nb; ++j) {
        const BasisVector& e = basis.block[static_cast<std::size_t>(j)];
        phi1_.col(j) = e.e1.real();
        phid_.col(j) = e.de1.real();
        phi2_.col(j) = e.e2.real();
        psi_block_.row(j) = e.f2.real().cwiseProduct(w).transpose();
    }
    lambda_.resize(n_tail_);
    a_.resize(n_tail_);
    b_.resize(n_tail_);
    trace0_.resize(n_tail_);
    trace_over_lambda_.resize(n_tail_);
    for (int i = 0; i < n_tail_; ++i) {
        const Mode& mode = basis.mode(n0_ + 1 + i);
        const int c = nb + 2 * i;
        // 2 Re(w e) = 2 Re(w) Re(e) - 2 Im(w) Im(e)
        phi1_.col(c) = 2.0 * mode.e1.real();
        phi1_.col(c + 1) = -2.0 * mode.e1.imag();
        phid_.col(c) = 2.0 * mode.de1.real();
        phid_.col(c + 1) = -2.0 * mode.de1.imag();
        phi2_.col(c) = 2.0 * mode.e2.real();
        phi2_.col(c + 1) = -2.0 * mode.e2.imag();
        psi_tail_.row(i) = mode.f2.conjugate().cwiseProduct(w.cast<cplx>()).transpose();
        lambda_[i] = mode.lambda;
        a_[i] = mode.a;
        b_[i] = mode.b;
        trace0_[i] = mode.trace0;
        trace_over_lambda_[i] = mode.trace0 / mode.lambda;
    }
    M_ = lyapunov_constant(basis, gains);
}

Eigen::VectorXcd ClosedLoop::coefficients(const Eigen::VectorXd& state) const {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(2 * N_ + 1);
    for (int k = -n0_; k <= n0_; ++k) c[k + N_] = state[1 + k + n0_];
    for (int i = 0; i < n_tail_; ++i) {
        const cplx wk(state[m_ + 2 * i], state[m_ + 2 * i + 1]);
        const int k = n0_ + 1 + i;
        c[k + N_] = wk;
        c[-k + N_] = std::conj(wk);
    }
    return c;
}

Eigen::VectorXd ClosedLoop::pack(double v, const Eigen::VectorXcd& coeffs, double xi) const {
    Eigen::VectorXd s(dim());
    s[0] = v;
    for (int k = -n0_; k <= n0_; ++k) s[1 + k + n0_] = coeffs[k + N_].real();
    s[m_ - 1] = xi;
    for (int i = 0; i < n_tail_; ++i) {
        const cplx wk = coeffs[n0_ + 1 + i + N_];
        s[m_ + 2 * i] = wk.real();
        s[m_ + 2 * i + 1] = wk.imag();
    }
    return s;
}

namespace {

Eigen::VectorXd modal_coordinates(const Eigen::VectorXd& state, int m, int nb) {
    Eigen::VectorXd c(nb + state.size() - m);
    c.head(nb) = state.segment(1, nb);
    c.tail(state.size() - m) = state.tail(state.size() - m);
    return c;
}

}  // namespace

StateFunction ClosedLoop::deviation(const Eigen::VectorXd& state) const {
    const Eigen::VectorXd c = modal_coordinates(state, m_, 2 * n0_ + 1);
    return {phi1_ * c, phid_ * c, phi2_ * c};
}

Eigen::VectorXd ClosedLoop::rhs(double t, const Eigen::VectorXd& state) const {
    const int nb = 2 * n0_ + 1;
    const Eigen::VectorXd c = modal_coordinates(state, m_, nb);
    const Eigen::VectorXd X = state.head(m_);
    const double v = X[0];
    const double v_d = gains_.K.dot(X);

    Eigen::VectorXd r_block = Eigen::VectorXd::Zero(nb);
    Eigen::VectorXcd r_tail = Eigen::VectorXcd::Zero(n_tail_);
    if (!affine_) {
        const Eigen::VectorXd w1 = phi1_ * c;
        if (!w1.allFinite()) throw DivergenceError(at_time("non-finite reconstruction", t), t);
        const Eigen::VectorXd r = residual_field(ss_.y, w1, f_, rule_);
        r_block = psi_block_ * r;
        r_tail = psi_tail_ * r.cast<cplx>();
    } else if (!state.allFinite()) {
        throw DivergenceError(at_time("non-finite state", t), t);
    }

    double gamma = zr_(t);
    for (int i = 0; i < n_tail_; ++i) gamma += 2.0 * (trace_over_lambda_[i] * r_tail[i]).real();

    Eigen::VectorXd d(dim());
    d.head(m_) = gains_.A_K * X;
    d.segment(1, nb) += r_block;
    d[m_ - 1] -= gamma;
    for (int i = 0; i < n_tail_; ++i) {
        const cplx wk(state[m_ + 2 * i], state[m_ + 2 * i + 1]);
        const cplx dw = lambda_[i] * wk + a_[i] * v + b_[i] * v_d + r_tail[i];
        d[m_ + 2 * i] = dw.real();
        d[m_ + 2 * i + 1] = dw.imag();
    }
    return d;
}

double ClosedLoop::lyapunov(const Eigen::VectorXd& state) const {
    const Eigen::VectorXd X = state.head(m_);
    double tail = 0.0;
    for (int i = 0; i < n_tail_; ++i) {
        tail += state[m_ + 2 * i] * state[m_ + 2 * i] + state[m_ + 2 * i + 1] * state[m_ + 2 * i + 1];
    }
    // (1/2) sum over |k| > n0 of |w_k|^2 equals the sum over k > n0.
    return M_ * X.dot(gains_.P * X) + tail;
}

TraceRecord ClosedLoop::diagnostics(double t, const Eigen::VectorXd& state) const {
    const Grid& grid = basis_.grid;
    const int nb = 2 * n0_ + 1;
    const Eigen::VectorXd X = state.head(m_);
    const StateFunction w = deviation(state);
    const double v = X[0];
    const double xv = v / (basis_.alpha * basis_.L);

    TraceRecord rec{};
    rec.t = t;
    double dz = 0.0, shift = 0.0;
    for (int j = 0; j < nb; ++j) dz += X[1 + j] * basis_.block[static_cast<std::size_t>(j)].trace0.real();
    for (int i = 0; i < n_tail_; ++i) {
        const cplx wk(state[m_ + 2 * i], state[m_ + 2 * i + 1]);
        dz += 2.0 * (wk * trace0_[i]).real();
        shift += 2.0 * (wk * trace_over_lambda_[i]).real();
    }
    rec.z = ss_.z_e + dz;
    rec.u = ss_.u_e - basis_.alpha * w.w2[grid.size() - 1];
    rec.v = v;
    rec.v_d = gains_.K.dot(X);
    rec.xi = X[m_ - 1];
    rec.zeta = rec.xi + shift;
    rec.V = lyapunov(state);
    const Eigen::VectorXd yt = w.w2 + xv * grid.x();
    rec.E = quad_simpson(grid, Eigen::VectorXd(yt.cwiseAbs2() + w.dw1.cwiseAbs2()));
    rec.normW = std::sqrt(std::max(0.0, quad_simpson(grid, Eigen::VectorXd(w.dw1.cwiseAbs2() + w.w2.cwiseAbs2()))));
    rec.w1_inf = w.w1.cwiseAbs().maxCoeff();
    return rec;
}

Snapshot ClosedLoop::snapshot(double t, const Eigen::VectorXd& state) const {
    const StateFunction w = deviation(state);
    const double xv = state[0] / (basis_.alpha * basis_.L);
    return {t, basis_.grid.x(), ss_.y + w.w1, w.w2 + xv * basis_.grid.x()};
}

StateFunction initial_deviation(const InitialCondition& ic, const Grid& grid, double alpha) {
    const Eigen::Index n = grid.size();
    const double L = grid.length();
    double s1 = 0.0, s2 = 0.0;
    switch (ic.kind) {
        case InitialCondition::Kind::Zero:
        case InitialCondition::Kind::RandomModes:
            break;
        case InitialCondition::Kind::Ramp:
            s1 = ic.scale * 2.0 * alpha / 5.0;
            s2 = -ic.scale * 2.0 / (5.0 * L);
            break;
        case InitialCondition::Kind::Linear:
            s1 = ic.slope1;
            s2 = ic.slope2;
            break;
    }
    return {s1 * grid.x(), Eigen::VectorXd::Constant(n, s1), s2 * grid.x()};
}

Eigen::VectorXcd initial_coefficients(const ProblemConfig& config, const ModeBasis& basis) {
    if (config.ic.kind != InitialCondition::Kind::RandomModes) {
        return project(basis, initial_deviation(config.ic, basis.grid, config.alpha));
    }
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int N = basis.n_modes;
    Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(basis.size());
    for (int k = -basis.n0; k <= basis.n0; ++k) coeffs[k + N] = config.ic.scale * u(rng);
    for (int k = basis.n0 + 1; k <= N; ++k) {
        const double re = u(rng), im = u(rng);
        coeffs[k + N] = config.ic.scale * cplx(re, im);
        coeffs[-k + N] = std::conj(coeffs[k + N]);
    }
    return coeffs;
}

Eigen::VectorXd initial_state(const ProblemConfig& config, const ModeBasis& basis, const ClosedLoop& loop) {
    const Eigen::VectorXcd coeffs = initial_coefficients(config, basis);
    return loop.pack(config.v0, coeffs, xi_from_zeta(basis, config.zeta0, coeffs));
}

SimulationOptions simulation_options(const ProblemConfig& config) {
    return {config.dt, config.T, config.record_every, config.snapshots};
}

SimulationTrace run_simulation(const ClosedLoop& loop, const Eigen::VectorXd& x0, const SimulationOptions& options) {
    if (!(options.dt > 0.0) || !(options.T > 0.0)) throw Error("run_simulation: dt and T must be positive");
    if (options.record_every < 1) throw Error("run_simulation: record_every must be >= 1");
    const long n_steps = std::lround(options.T / options.dt);
    const double dt = options.dt;
    SimulationTrace trace;
    trace.lyapunov_M = loop.lyapunov_M();
    const auto snaps = snapshot_steps(n_steps, options.snapshots);
    std::size_t next_snap = 0;

    Eigen::VectorXd state = x0;
    for (long step = 0;; ++step) {
        const double t = static_cast<double>(step) * dt;
        if (step % options.record_every == 0 || step == n_steps) trace.records.push_back(loop.diagnostics(t, state));
        while (next_snap < snaps.size() && snaps[next_snap] == step) {
            trace.snapshots.push_back(loop.snapshot(t, state));
            ++next_snap;
        }
        if (step == n_steps) break;
        try {
            state = rk4_step(loop, t, state, dt);
        } catch (const DivergenceError& e) {
            trace.diverged = true;
            trace.failure = e.what();
            break;
        }
        if (!state.allFinite() || state.cwiseAbs().maxCoeff() > 1e8) {
            trace.diverged = true;
            trace.failure = at_time("modal state diverged", t + dt);
            break;
        }
    }
    return trace;
}

SimulationTrace run_simulation(const ProblemConfig& config, const SteadyState& ss, const ModeBasis& basis,
                               const ReducedModel& model, const ControllerGains& gains) {
    const ClosedLoop loop(basis, model, gains, ss, config.f, config.zr);
    return run_simulation(loop, initial_state(config, basis, loop), simulation_options(config));
}

double log_slope(const std::vector<double>& t, const std::vector<double>& values, double t_from, double t_to,
                 double floor) {
    if (t.size() != values.size()) throw Error("log_slope: size mismatch");
    double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_from || t[i] > t_to || !(values[i] > floor)) continue;
        const double y = std::log(values[i]);
        n += 1.0;
        st += t[i];
        sy += y;
        stt += t[i] * t[i];
        sty += t[i] * y;
    }
    if (n < 10.0) throw Error("log_slope: fewer than 10 usable samples in the fit window");
    const double den = n * stt - st * st;
    if (!(den > 0.0)) throw Error("log_slope: degenerate time window");
    return (n * sty - st * sy) / den;
}

double estimate_decay_rate(const SimulationTrace& trace, double t_from, double t_to) {
    std::vector<double> t, V;
    t.reserve(trace.records.size());
    V.reserve(trace.records.size());
    for (const auto& r : trace.records) {
        t.push_back(r.t);
        V.push_back(r.V);
    }
    return -0.5 * log_slope(t, V, t_from, t_to);
}

OracleComparison compare_outputs(const SimulationTrace& modal, const SimulationTrace& fdm, double z_e) {
    if (modal.records.size() < 2 || fdm.records.empty()) throw Error("compare_outputs: empty trace");
    OracleComparison c;
    std::size_t j = 0;
    const auto& m = modal.records;
    for (const auto& r : fdm.records) {
        if (r.t < m.front().t || r.t > m.back().t) continue;
        while (j + 2 < m.size() && m[j + 1].t < r.t) ++j;
        const double span = m[j + 1].t - m[j].t;
        const double w = span > 0.0 ? (r.t - m[j].t) / span : 0.0;
        const double zm = (1.0 - w) * m[j].z + w * m[j + 1].z;
        c.max_abs = std::max(c.max_abs, std::abs(zm - r.z));
        c.reference = std::max(c.reference, std::abs(r.z - z_e));
    }
    c.relative = c.reference > 0.0 ? c.max_abs / c.reference : c.max_abs;
    return c;
}

}  // namespace waveforge
