#pragma once

#include <Eigen/Dense>

#include "waveforge/hilbert.hpp"
#include "waveforge/spectrum.hpp"

namespace waveforge {

/// Coefficients w_k = <W, f_k>, indexed k + N for k = -N..N. Inside the
/// real block the recombined duals are used, so those entries are real.
Eigen::VectorXcd project(const ModeBasis& basis, const StateFunction& w);

/// Real part of sum_k w_k e_k on the basis grid.
StateFunction reconstruct(const ModeBasis& basis, const Eigen::VectorXcd& coeffs);

/// The state function carried by slot k of the basis (real part).
StateFunction slot_function(const ModeBasis& basis, int k);

struct TailConstants {
    double alpha0 = 0.0;
    double beta0 = 0.0;
    double last_term = 0.0;  // |2 Re(trace0 a / lambda)| of the last summand
    int n_tail = 0;
};

/// alpha0 = -2 sum_{k=n0+1}^{n_tail} Re(trace0_k a_k / lambda_k), beta0 with b_k.
/// n_tail < 0 uses every mode available (simulated modes plus extension).
TailConstants tail_constants(const ModeBasis& basis, int n_tail = -1);

/// sum_{n0 < |k| <= N} trace0_k w_k / lambda_k (real for conjugate-symmetric w).
double integral_shift(const ModeBasis& basis, const Eigen::VectorXcd& coeffs);
double xi_from_zeta(const ModeBasis& basis, double zeta, const Eigen::VectorXcd& coeffs);
double zeta_from_xi(const ModeBasis& basis, double xi, const Eigen::VectorXcd& coeffs);

/// State X = (v, w_{-n0}, .., w_{n0}, xi) with dynamics X' = A X + B v_d + Gamma.
struct ReducedModel {
    int n0 = 0;
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd L1;
    double alpha0 = 0.0;
    double beta0 = 0.0;
    Eigen::VectorXd a_vec;  // a_k over the block
    Eigen::VectorXd b_vec;
    Eigen::MatrixXd A0;
    double imag_residue = 0.0;

    int dim() const noexcept { return static_cast<int>(A.rows()); }
};

ReducedModel assemble_reduced_model(const ModeBasis& basis, const TailConstants& tail);

}  // namespace waveforge
