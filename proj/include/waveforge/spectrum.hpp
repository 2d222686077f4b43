#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "waveforge/hilbert.hpp"
#include "waveforge/model.hpp"
#include "waveforge/numerics.hpp"
#include "waveforge/steady.hpp"

namespace waveforge {

/// One eigentriple of the velocity-damped operator with its dual vector.
struct Mode : BasisVector {
    int k = 0;
    cplx lambda{};
    double norm_residual = 0.0;      // | ||e||_H - 1 |
    double bc_residual = 0.0;        // |e1'(L) + alpha lambda e1(L)|
    double dual_bc_residual = 0.0;   // |f1'(L) - alpha f2(L)|
};

/// Scalar data of a mode beyond the simulated cutoff, kept for tail sums.
struct TailTerm {
    int k = 0;
    cplx lambda{};
    cplx trace0{};
    cplx a{};
    cplx b{};
};

/// Modes k = -N..N. Slots |k| <= n0 are replaced by a real recombination:
/// slot +k holds Re e_k with dual 2 Re f_k, slot -k holds Im e_k with dual
/// 2 Im f_k (k > 0); slot 0 holds the real mode e_0.
struct ModeBasis {
    Grid grid;
    double L = 1.0;
    double alpha = 1.1;
    int n_modes = 0;
    int n0 = 0;
    std::vector<Mode> modes;           // index k + n_modes
    std::vector<BasisVector> block;    // index k + n0, real-valued samples
    std::vector<TailTerm> extension;   // k = n_modes+1 .. n_tail
    double gram_min = 0.0;
    double gram_max = 0.0;
    std::vector<std::string> warnings;

    int size() const noexcept { return 2 * n_modes + 1; }
    const Mode& mode(int k) const { return modes.at(static_cast<std::size_t>(k + n_modes)); }
    /// The basis vector used for coefficient k (recombined inside the block).
    const BasisVector& slot(int k) const {
        return (k >= -n0 && k <= n0) ? block.at(static_cast<std::size_t>(k + n0)) : mode(k);
    }
};

struct ShootOptions {
    int substeps = 8;
    double tol = 1e-12;
    int max_iter = 60;
};

struct EigenShot {
    cplx lambda{};
    Eigen::VectorXcd w;   // raw w1 with w1(0) = 0, w1'(0) = 1
    Eigen::VectorXcd dw;
    double residual = 0.0;
};

/// mu_k = (1/2L) log((alpha-1)/(alpha+1)) + i k pi / L, the spectrum for f = 0.
cplx linear_spectrum_closed_form(double L, double alpha, int k);

/// Boundary mismatch S(lambda) = w1'(L) + alpha lambda w1(L) of the eigen-ODE
/// w1'' = (lambda^2 - f'(y_e)) w1 shot from w1(0) = 0, w1'(0) = 1.
cplx eigen_mismatch(const Nonlinearity& f, const SteadyState& ss, double alpha, cplx lambda, int substeps);

/// Secant on the shooting mismatch from `guess`.
EigenShot eigen_shoot(const Nonlinearity& f, const SteadyState& ss, double alpha, cplx guess,
                      const ShootOptions& options = {});

/// Normalizes a shot to ||e||_H = 1 with e2 = lambda e1 and (e1)'(0) real positive.
Mode build_eigenfunction(const Grid& grid, double alpha, int k, const EigenShot& shot);

/// Adjoint eigenvector for conj(lambda), scaled so that <e, f>_H = 1. Fills
/// f1, df1, f2, traceL and dual_bc_residual of `mode`.
void dual_shoot(const Nonlinearity& f, const SteadyState& ss, double alpha, Mode& mode, int substeps);

/// a_k = <a, f_k>, b_k = <b, f_k>.
void ab_coefficients(const Grid& grid, double alpha, BasisVector& v);

struct BasisOptions {
    int n_modes = 10;
    int n_tail = 10;
    std::optional<int> n0;
    ShootOptions shoot;
    int threads = 0;  // 0: WAVEFORGE_THREADS or hardware concurrency
};

BasisOptions basis_options(const ProblemConfig& config);

ModeBasis build_basis(const Nonlinearity& f, const SteadyState& ss, double alpha, const BasisOptions& options);
ModeBasis build_basis(const ProblemConfig& config, const SteadyState& ss);

/// (k, l) entry: <e_k, f_l>_H over the stored modes (unrecombined).
Eigen::MatrixXcd biorthogonality_matrix(const ModeBasis& basis);
double max_biorthogonality_defect(const ModeBasis& basis);

/// Truncated (w1)'(0) = sum_k w_k (e_k^1)'(0) for coefficients indexed -N..N.
double neumann_trace_series(const ModeBasis& basis, const Eigen::VectorXcd& coeffs);

/// Worker count for per-mode tasks: WAVEFORGE_THREADS if set, else hardware.
int worker_threads(int requested = 0);

}  // namespace waveforge
