#include "waveforge/control.hpp"

#include <algorithm>
#include <sstream>

namespace waveforge {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

}  // namespace

Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& A, const Eigen::VectorXd& B) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || B.size() != n) throw Error("controllability_matrix: dimension mismatch");
    Eigen::MatrixXd C(n, n);
    if (n == 0) return C;
    C.col(0) = B;
    for (Eigen::Index j = 1; j < n; ++j) C.col(j) = A * C.col(j - 1);
    return C;
}

KalmanReport kalman_check(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, double tol) {
    KalmanReport r;
    r.C = controllability_matrix(A, B);
    r.n = static_cast<int>(A.rows());
    r.rank = rank_numeric(r.C, tol);
    r.min_pivot = min_relative_pivot(r.C);
    r.controllable = r.rank == r.n;
    return r;
}

Eigen::VectorXd real_poly_from_roots(const std::vector<std::complex<double>>& roots) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(roots.size()) + 1);
    c[0] = 1.0;
    for (std::size_t j = 0; j < roots.size(); ++j) {
        // multiply by (s - p): coefficients stored lowest degree first
        for (Eigen::Index i = static_cast<Eigen::Index>(j) + 1; i >= 1; --i) c[i] = c[i - 1] - roots[j] * c[i];
        c[0] = -roots[j] * c[0];
    }
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if (c.imag().cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw ControlDesignError("poles", "multiset is not closed under conjugation");
    }
    return c.real();
}

Eigen::RowVectorXd place_poles(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                               const std::vector<std::complex<double>>& poles) {
    const Eigen::Index n = A.rows();
    if (static_cast<Eigen::Index>(poles.size()) != n) {
        throw ControlDesignError("place_poles", "need " + std::to_string(n) + " poles, got " +
                                                    std::to_string(poles.size()));
    }
    const Eigen::VectorXd q = real_poly_from_roots(poles);
    const Eigen::MatrixXd C = controllability_matrix(A, B);
    if (rank_numeric(C, 1e-12) < n) {
        throw ControlDesignError("place_poles", "controllability matrix is singular (pair not controllable)");
    }
    // q(A) by Horner.
    Eigen::MatrixXd qA = Eigen::MatrixXd::Identity(n, n) * q[n];
    for (Eigen::Index i = n - 1; i >= 0; --i) qA = (A * qA + q[i] * Eigen::MatrixXd::Identity(n, n)).eval();
    Eigen::VectorXd en = Eigen::VectorXd::Zero(n);
    en[n - 1] = 1.0;
    const Eigen::VectorXd y = solve_linear(C.transpose(), en);  // y^T = e_n^T C^{-1}
    const Eigen::RowVectorXd K = -(y.transpose() * qA);

    const double resid = placement_residual(A + B * K, poles);
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    if (!(resid <= 1e-6 * scale)) {
        throw ControlDesignError("place_poles", "placement residual " + fmt(resid) +
                                                    " too large; the pole set is badly conditioned, try respacing");
    }
    return K;
}

double placement_residual(const Eigen::MatrixXd& M, const std::vector<std::complex<double>>& poles) {
    double r = 0.0;
    for (const auto& p : poles) r = std::max(r, std::abs(charpoly_eval(M, p)));
    return r;
}

void validate_poles(const std::vector<std::complex<double>>& poles, int n) {
    if (static_cast<int>(poles.size()) != n) {
        throw ControlDesignError("poles", "the reduced model has dimension " + std::to_string(n) + " but " +
                                              std::to_string(poles.size()) + " poles were given");
    }
    for (const auto& p : poles) {
        if (!(p.real() < 0.0)) {
            std::ostringstream os;
            os << "pole " << p.real() << (p.imag() < 0 ? "-" : "+") << std::abs(p.imag())
               << "i has nonnegative real part";
            throw ControlDesignError("poles", os.str());
        }
    }
    std::vector<bool> used(poles.size(), false);
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        if (poles[i].imag() == 0.0) continue;
        bool found = false;
        for (std::size_t j = 0; j < poles.size() && !found; ++j) {
            if (!used[j] && std::abs(poles[j] - std::conj(poles[i])) <= 1e-12 * std::max(1.0, std::abs(poles[i]))) {
                used[j] = true;
                found = true;
            }
        }
        if (!found) throw ControlDesignError("poles", "pole list is not closed under conjugation");
    }
}

ControllerGains design_controller(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                                  const std::vector<std::complex<double>>& poles) {
    const int n = static_cast<int>(A.rows());
    validate_poles(poles, n);
    ControllerGains g;
    g.poles = poles;
    g.kalman = kalman_check(A, B);
    if (!g.kalman.controllable) {
        throw ControlDesignError("kalman_check", "rank " + std::to_string(g.kalman.rank) + " < " +
                                                     std::to_string(n) + " (min pivot " +
                                                     fmt(g.kalman.min_pivot) + ")");
    }
    g.K = place_poles(A, B, poles);
    g.A_K = A + B * g.K;
    g.placement_residual = placement_residual(g.A_K, poles);
    const double scale = std::max(1.0, real_poly_from_roots(poles).cwiseAbs().maxCoeff());
    if (!(g.placement_residual < 1e-8 * scale)) {
        throw ControlDesignError("place_poles", "placement residual " + fmt(g.placement_residual) +
                                                    " exceeds 1e-8 times the polynomial scale");
    }
    try {
        g.P = solve_lyapunov(g.A_K);
    } catch (const Error& e) {
        throw ControlDesignError("solve_lyapunov", e.what());
    }
    g.lyapunov_residual = norm_inf(g.A_K.transpose() * g.P + g.P * g.A_K + Eigen::MatrixXd::Identity(n, n));
    const Eigen::LLT<Eigen::MatrixXd> llt(g.P);
    if (llt.info() != Eigen::Success) {
        throw ControlDesignError("solve_lyapunov", "P is not positive definite (Cholesky failed)");
    }
    g.p_min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g.P, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    return g;
}

ControllerGains design_controller(const ReducedModel& model, const std::vector<std::complex<double>>& poles) {
    return design_controller(model.A, model.B, poles);
}

}  // namespace waveforge
