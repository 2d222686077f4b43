#include "waveforge/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

namespace waveforge {

namespace {

using Vec4c = Eigen::Matrix<cplx, 4, 1>;
using Vec6c = Eigen::Matrix<cplx, 6, 1>;

// Eigen-ODE carried together with the steady profile so that f'(y_e) is
// available at every RK4 stage without interpolation.
// State: (y_e, y_e', w, w').
struct EigenField {
    const Nonlinearity& f;
    cplx lambda_sq;
    Vec4c operator()(double, const Vec4c& s) const {
        const double y = s[0].real();
        return Vec4c(s[1], -f.value(y), s[3], (lambda_sq - f.derivative(y)) * s[2]);
    }
};

// Adjoint second component z with z'' = (conj(lambda)^2 - f'(y_e)) z, plus
// G'' = f'(y_e) z, G(0) = G'(0) = 0. State: (y_e, y_e', z, z', G, G').
struct DualField {
    const Nonlinearity& f;
    cplx lambda_bar_sq;
    Vec6c operator()(double, const Vec6c& s) const {
        const double y = s[0].real();
        const double fp = f.derivative(y);
        Vec6c d;
        d << s[1], -f.value(y), s[3], (lambda_bar_sq - fp) * s[2], s[5], fp * s[2];
        return d;
    }
};

template <class State, class Field, class Sink>
State shoot_over_grid(const Grid& grid, int substeps, Field&& field, State state, Sink&& sink) {
    const double h = grid.spacing() / substeps;
    sink(0, state);
    for (int i = 1; i < grid.size(); ++i) {
        for (int s = 0; s < substeps; ++s) {
            state = rk4_step(field, grid.x()[i - 1] + s * h, state, h);
        }
        sink(i, state);
    }
    return state;
}

void conjugate_into(const Mode& src, Mode& dst) {
    dst = src;
    dst.k = -src.k;
    dst.lambda = std::conj(src.lambda);
    for (auto* v : {&dst.e1, &dst.de1, &dst.e2, &dst.f1, &dst.df1, &dst.f2}) *v = v->conjugate();
    dst.trace0 = std::conj(src.trace0);
    dst.traceL = std::conj(src.traceL);
    dst.a = std::conj(src.a);
    dst.b = std::conj(src.b);
}

template <class Task>
void parallel_for(int count, int threads, Task&& task) {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min(threads, count));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

BasisVector real_part_of(const BasisVector& v, double dual_scale) {
    BasisVector out;
    out.e1 = v.e1.real().cast<cplx>();
    out.de1 = v.de1.real().cast<cplx>();
    out.e2 = v.e2.real().cast<cplx>();
    out.f1 = (dual_scale * v.f1.real()).cast<cplx>();
    out.df1 = (dual_scale * v.df1.real()).cast<cplx>();
    out.f2 = (dual_scale * v.f2.real()).cast<cplx>();
    return out;
}

BasisVector imag_part_of(const BasisVector& v, double dual_scale) {
    BasisVector out;
    out.e1 = v.e1.imag().cast<cplx>();
    out.de1 = v.de1.imag().cast<cplx>();
    out.e2 = v.e2.imag().cast<cplx>();
    out.f1 = (dual_scale * v.f1.imag()).cast<cplx>();
    out.df1 = (dual_scale * v.df1.imag()).cast<cplx>();
    out.f2 = (dual_scale * v.f2.imag()).cast<cplx>();
    return out;
}

double max_imag(const BasisVector& v) {
    double m = 0.0;
    for (const auto* s : {&v.e1, &v.de1, &v.e2, &v.f1, &v.df1, &v.f2}) {
        if (s->size() > 0) m = std::max(m, s->imag().cwiseAbs().maxCoeff());
    }
    return m;
}

std::string describe(cplx z) {
    std::ostringstream os;
    os.precision(8);
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

}  // namespace

cplx linear_spectrum_closed_form(double L, double alpha, int k) {
    if (!(alpha > 1.0)) throw Error("linear_spectrum_closed_form: alpha must exceed 1");
    return {damping_rate(L, alpha), k * std::numbers::pi / L};
}

cplx eigen_mismatch(const Nonlinearity& f, const SteadyState& ss, double alpha, cplx lambda, int substeps) {
    const Vec4c end = shoot_over_grid(ss.grid, substeps, EigenField{f, lambda * lambda},
                                      Vec4c(0.0, ss.z_e, 0.0, 1.0), [](int, const Vec4c&) {});
    return end[3] + alpha * lambda * end[2];
}

EigenShot eigen_shoot(const Nonlinearity& f, const SteadyState& ss, double alpha, cplx guess,
                      const ShootOptions& options) {
    auto mismatch = [&](cplx lambda) { return eigen_mismatch(f, ss, alpha, lambda, options.substeps); };
    EigenShot shot;
    shot.lambda = find_root_complex(mismatch, guess, options.tol, options.max_iter);

    const int n = ss.grid.size();
    shot.w.resize(n);
    shot.dw.resize(n);
    const Vec4c end = shoot_over_grid(ss.grid, options.substeps, EigenField{f, shot.lambda * shot.lambda},
                                      Vec4c(0.0, ss.z_e, 0.0, 1.0), [&](int i, const Vec4c& s) {
                                          shot.w[i] = s[2];
                                          shot.dw[i] = s[3];
                                      });
    shot.residual = std::abs(end[3] + alpha * shot.lambda * end[2]);
    return shot;
}

Mode build_eigenfunction(const Grid& grid, double alpha, int k, const EigenShot& shot) {
    Mode m;
    m.k = k;
    m.lambda = shot.lambda;
    const Eigen::VectorXcd e2 = shot.lambda * shot.w;
    const double norm_sq = inner_product_H(grid, shot.dw, e2, shot.dw, e2).real();
    if (!(norm_sq > 0.0) || !std::isfinite(norm_sq)) {
        throw SpectrumError("build_eigenfunction: degenerate shot (zero norm) for k = " + std::to_string(k));
    }
    const double scale = 1.0 / std::sqrt(norm_sq);
    cplx phase = 1.0;
    if (std::abs(scale * shot.dw[0]) >= 1e-10) {
        phase = std::conj(shot.dw[0]) / std::abs(shot.dw[0]);
    } else {
        Eigen::Index at;
        shot.w.cwiseAbs().maxCoeff(&at);
        phase = std::conj(shot.w[at]) / std::abs(shot.w[at]);
    }
    const cplx c = scale * phase;
    m.e1 = c * shot.w;
    m.de1 = c * shot.dw;
    m.e2 = shot.lambda * m.e1;
    m.trace0 = m.de1[0];
    const double norm = std::sqrt(inner_product_H(grid, m.de1, m.e2, m.de1, m.e2).real());
    m.norm_residual = std::abs(norm - 1.0);
    const Eigen::Index last = grid.size() - 1;
    m.bc_residual = std::abs(m.de1[last] + alpha * m.lambda * m.e1[last]);
    return m;
}

void dual_shoot(const Nonlinearity& f, const SteadyState& ss, double alpha, Mode& mode, int substeps) {
    if (std::abs(mode.lambda) <= 1e-8) {
        throw SpectrumError("dual_shoot: eigenvalue " + describe(mode.lambda) +
                            " too close to 0; the adjoint construction divides by conj(lambda)");
    }
    const Grid& grid = ss.grid;
    const int n = grid.size();
    const cplx lambda_bar = std::conj(mode.lambda);
    Eigen::VectorXcd z(n), dz(n), g(n), dg(n);
    const Vec6c end = shoot_over_grid(grid, substeps, DualField{f, lambda_bar * lambda_bar},
                                      Vec6c((Vec6c() << 0.0, ss.z_e, 0.0, 1.0, 0.0, 0.0).finished()),
                                      [&](int i, const Vec6c& s) {
                                          z[i] = s[2];
                                          dz[i] = s[3];
                                          g[i] = s[4];
                                          dg[i] = s[5];
                                      });
    // g = G + c x with g'(L) = 0.
    const cplx slope = -end[5];
    g += slope * grid.x().cast<cplx>();
    dg.array() += slope;

    Eigen::VectorXcd z1 = -(z + g) / lambda_bar;
    Eigen::VectorXcd dz1 = -(dz + dg) / lambda_bar;

    const cplx ip = inner_product_H(grid, mode.de1, mode.e2, dz1, z);
    if (std::abs(ip) < 1e-14) {
        throw SpectrumError("dual_shoot: <e_k, z> vanishes for k = " + std::to_string(mode.k) +
                            " (eigenvalue not algebraically simple?)");
    }
    const cplx s = 1.0 / std::conj(ip);
    mode.f1 = s * z1;
    mode.df1 = s * dz1;
    mode.f2 = s * z;
    const Eigen::Index last = n - 1;
    mode.traceL = mode.df1[last];
    mode.dual_bc_residual = std::abs(mode.df1[last] - alpha * mode.f2[last]);
    if (mode.dual_bc_residual > 1e-6) {
        throw SpectrumError("dual_shoot: adjoint boundary residual " + std::to_string(mode.dual_bc_residual) +
                            " for k = " + std::to_string(mode.k) + " (simplicity violated?)");
    }
}

void ab_coefficients(const Grid& grid, double alpha, BasisVector& v) {
    const StateFunction a = actuation_a(grid, alpha);
    const StateFunction b = actuation_b(grid, alpha);
    v.a = inner_product_H(grid, a, v);
    v.b = inner_product_H(grid, b, v);
}

int worker_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("WAVEFORGE_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

BasisOptions basis_options(const ProblemConfig& config) {
    BasisOptions o;
    o.n_modes = config.n_modes;
    o.n_tail = std::max(config.n_tail, config.n_modes);
    o.n0 = config.n0;
    o.shoot.substeps = config.substeps;
    o.shoot.tol = config.shoot_tol;
    return o;
}

ModeBasis build_basis(const Nonlinearity& f, const SteadyState& ss, double alpha, const BasisOptions& options) {
    const Grid& grid = ss.grid;
    const double L = grid.length();
    const int N = options.n_modes;
    const int n_tail = std::max(options.n_tail, N);
    if (N < 1) throw SpectrumError("build_basis: n_modes must be >= 1");

    std::vector<Mode> positive(static_cast<std::size_t>(n_tail + 1));
    parallel_for(n_tail + 1, worker_threads(options.threads), [&](int k) {
        const cplx guess = linear_spectrum_closed_form(L, alpha, k);
        EigenShot shot;
        try {
            shot = eigen_shoot(f, ss, alpha, guess, options.shoot);
        } catch (const NoConvergenceError& e) {
            throw SpectrumError("eigen_shoot: no convergence for k = " + std::to_string(k) + " from guess " +
                                describe(guess) + " (last " + describe(e.last_iterate()) +
                                ", residual " + std::to_string(e.residual()) + ")");
        }
        Mode m = build_eigenfunction(grid, alpha, k, shot);
        dual_shoot(f, ss, alpha, m, options.shoot.substeps);
        ab_coefficients(grid, alpha, m);
        positive[static_cast<std::size_t>(k)] = std::move(m);
    });

    // All roots from -n_tail..n_tail must be distinct.
    std::vector<std::pair<int, cplx>> roots;
    for (const auto& m : positive) {
        roots.emplace_back(m.k, m.lambda);
        if (m.k > 0) roots.emplace_back(-m.k, std::conj(m.lambda));
    }
    const double min_gap = 0.1 * std::numbers::pi / L;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (std::abs(roots[i].second - roots[j].second) < min_gap) {
                throw SpectrumError("duplicate root: k = " + std::to_string(roots[i].first) + " and k = " +
                                    std::to_string(roots[j].first) + " both converged near " +
                                    describe(roots[i].second));
            }
        }
    }

    ModeBasis basis{grid, L, alpha, N, 0, {}, {}, {}, 0.0, 0.0, {}};
    basis.modes.resize(static_cast<std::size_t>(2 * N + 1));
    for (int k = 0; k <= N; ++k) {
        basis.modes[static_cast<std::size_t>(k + N)] = positive[static_cast<std::size_t>(k)];
        if (k > 0) conjugate_into(positive[static_cast<std::size_t>(k)], basis.modes[static_cast<std::size_t>(N - k)]);
    }
    for (int k = N + 1; k <= n_tail; ++k) {
        const Mode& m = positive[static_cast<std::size_t>(k)];
        basis.extension.push_back({k, m.lambda, m.trace0, m.a, m.b});
    }

    // Unstable-block half-width.
    int detected = 0;
    for (int k = 0; k <= N; ++k) {
        if (basis.mode(k).lambda.real() >= -1.0) detected = k;
    }
    for (const auto& t : basis.extension) {
        if (t.lambda.real() >= -1.0) {
            basis.warnings.push_back("mode k = " + std::to_string(t.k) + " beyond n_modes has Re lambda = " +
                                     std::to_string(t.lambda.real()) + " >= -1");
        }
    }
    if (options.n0) {
        if (*options.n0 < detected) {
            throw SpectrumError("n0 = " + std::to_string(*options.n0) + " leaves mode k = " +
                                std::to_string(detected) + " with Re lambda >= -1 outside the block");
        }
        basis.n0 = *options.n0;
    } else {
        basis.n0 = detected;
    }
    if (N < basis.n0 + 1) {
        throw SpectrumError("n_modes = " + std::to_string(N) + " must be at least n0 + 1 = " +
                            std::to_string(basis.n0 + 1));
    }
    for (int k = basis.n0 + 1; k <= N; ++k) {
        const double re = basis.mode(k).lambda.real();
        if (re >= -1.05 && re < -1.0) {
            basis.warnings.push_back("thin stability margin: Re lambda_" + std::to_string(k) + " = " +
                                     std::to_string(re) + " in [-1.05, -1]");
        }
    }

    // Real recombination of the block.
    basis.block.resize(static_cast<std::size_t>(2 * basis.n0 + 1));
    {
        const Mode& m0 = basis.mode(0);
        if (std::abs(m0.lambda.imag()) > 0.0 || max_imag(m0) > 1e-8) {
            throw SpectrumError("mode k = 0 is not real (lambda = " + describe(m0.lambda) + ")");
        }
        basis.block[static_cast<std::size_t>(basis.n0)] = real_part_of(m0, 1.0);
    }
    for (int k = 1; k <= basis.n0; ++k) {
        const Mode& m = basis.mode(k);
        if (m.lambda.imag() == 0.0) {
            throw SpectrumError("real eigenvalue at k = " + std::to_string(k) +
                                " has no conjugate partner for recombination");
        }
        basis.block[static_cast<std::size_t>(basis.n0 + k)] = real_part_of(m, 2.0);
        basis.block[static_cast<std::size_t>(basis.n0 - k)] = imag_part_of(m, 2.0);
    }
    const Eigen::Index last = grid.size() - 1;
    for (auto& v : basis.block) {
        v.trace0 = v.de1[0];
        v.traceL = v.df1[last];
        ab_coefficients(grid, alpha, v);
    }

    // Riesz-constant estimates from the truncated Gram matrix.
    const int n = basis.size();
    Eigen::MatrixXcd de1(grid.size(), n), e2(grid.size(), n);
    for (int i = 0; i < n; ++i) {
        de1.col(i) = basis.modes[static_cast<std::size_t>(i)].de1;
        e2.col(i) = basis.modes[static_cast<std::size_t>(i)].e2;
    }
    const Eigen::VectorXcd w = grid.simpson_weights().cast<cplx>();
    const Eigen::MatrixXcd gram =
        de1.adjoint() * w.asDiagonal() * de1 + e2.adjoint() * w.asDiagonal() * e2;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
    basis.gram_min = eig.eigenvalues().minCoeff();
    basis.gram_max = eig.eigenvalues().maxCoeff();
    return basis;
}

ModeBasis build_basis(const ProblemConfig& config, const SteadyState& ss) {
    return build_basis(config.f, ss, config.alpha, basis_options(config));
}

Eigen::MatrixXcd biorthogonality_matrix(const ModeBasis& basis) {
    const int n = basis.size();
    const int m = basis.grid.size();
    Eigen::MatrixXcd de1(m, n), e2(m, n), df1(m, n), f2(m, n);
    for (int i = 0; i < n; ++i) {
        const Mode& mode = basis.modes[static_cast<std::size_t>(i)];
        de1.col(i) = mode.de1;
        e2.col(i) = mode.e2;
        df1.col(i) = mode.df1;
        f2.col(i) = mode.f2;
    }
    const Eigen::VectorXcd w = basis.grid.simpson_weights().cast<cplx>();
    // (F^H W E)(l, k) = <e_k, f_l>; transpose to index (k, l).
    return (df1.adjoint() * w.asDiagonal() * de1 + f2.adjoint() * w.asDiagonal() * e2).transpose();
}

double max_biorthogonality_defect(const ModeBasis& basis) {
    const Eigen::MatrixXcd b = biorthogonality_matrix(basis);
    return (b - Eigen::MatrixXcd::Identity(b.rows(), b.cols())).cwiseAbs().maxCoeff();
}

double neumann_trace_series(const ModeBasis& basis, const Eigen::VectorXcd& coeffs) {
    if (coeffs.size() != basis.size()) throw Error("neumann_trace_series: coefficient count mismatch");
    cplx sum = 0.0;
    for (int k = -basis.n_modes; k <= basis.n_modes; ++k) sum += coeffs[k + basis.n_modes] * basis.slot(k).trace0;
    if (std::abs(sum.imag()) > 1e-6) {
        throw SpectrumError("neumann_trace_series: imaginary residue " + std::to_string(sum.imag()) +
                            " (coefficients not conjugate-symmetric)");
    }
    return sum.real();
}

}  // namespace waveforge
