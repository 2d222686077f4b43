#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "waveforge/reduction.hpp"

namespace waveforge {

struct KalmanReport {
    bool controllable = false;
    int rank = 0;
    int n = 0;
    double min_pivot = 0.0;  // relative to ||C||_inf
    Eigen::MatrixXd C;       // [B, AB, .., A^{n-1} B]
};

Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& A, const Eigen::VectorXd& B);
KalmanReport kalman_check(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, double tol = 1e-10);

/// Real coefficients c_0..c_n (c_n = 1) of prod (s - p). Throws if the
/// multiset is not closed under conjugation.
Eigen::VectorXd real_poly_from_roots(const std::vector<std::complex<double>>& roots);

/// Ackermann: K = -e_n^T C^{-1} q(A), so that A + B K has the given poles.
Eigen::RowVectorXd place_poles(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                               const std::vector<std::complex<double>>& poles);

/// max_p |det(p I - M)| over the pole list.
double placement_residual(const Eigen::MatrixXd& M, const std::vector<std::complex<double>>& poles);

struct ControllerGains {
    Eigen::RowVectorXd K;
    Eigen::MatrixXd A_K;
    Eigen::MatrixXd P;
    std::vector<std::complex<double>> poles;
    double placement_residual = 0.0;
    double lyapunov_residual = 0.0;  // ||A_K^T P + P A_K + I||_inf
    double p_min_eig = 0.0;
    KalmanReport kalman;
};

/// Rejects pole lists of the wrong size, not closed under conjugation, or
/// with nonnegative real parts.
void validate_poles(const std::vector<std::complex<double>>& poles, int n);

ControllerGains design_controller(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                                  const std::vector<std::complex<double>>& poles);
ControllerGains design_controller(const ReducedModel& model, const std::vector<std::complex<double>>& poles);

}  // namespace waveforge
