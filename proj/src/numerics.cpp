#include "waveforge/numerics.hpp"

#include <numbers>

namespace waveforge {

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& p : problems) msg += "\n  - " + p;
          return msg;
      }()),
      problems_(std::move(problems)) {}

Grid::Grid(int n_points, double length) : length_(length) {
    if (n_points < 3 || n_points % 2 == 0) {
        throw ConfigError({"grid_points must be odd and >= 3 (got " + std::to_string(n_points) + ")"});
    }
    if (!(length > 0.0)) throw ConfigError({"domain length L must be positive"});
    spacing_ = length / static_cast<double>(n_points - 1);
    x_.resize(n_points);
    for (int i = 0; i < n_points; ++i) x_[i] = spacing_ * i;
    x_[n_points - 1] = length;
    weights_.resize(n_points);
    for (int i = 0; i < n_points; ++i) weights_[i] = (i % 2 == 0) ? 2.0 : 4.0;
    weights_[0] = 1.0;
    weights_[n_points - 1] = 1.0;
    weights_ *= spacing_ / 3.0;
}

cplx find_root_complex(const std::function<cplx(cplx)>& fn, cplx guess, double tol, int max_iter,
                       cplx second_guess_offset) {
    cplx z0 = guess;
    cplx f0 = fn(z0);
    if (std::abs(f0) < tol) return z0;
    cplx z1 = guess + second_guess_offset;
    cplx f1 = fn(z1);
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(f1) < tol) return z1;
        const cplx df = f1 - f0;
        if (df == cplx(0.0)) {
            throw NoConvergenceError("find_root_complex: flat secant", z1, std::abs(f1));
        }
        const cplx z2 = z1 - f1 * (z1 - z0) / df;
        z0 = z1;
        f0 = f1;
        z1 = z2;
        f1 = fn(z1);
        if (!std::isfinite(std::abs(f1))) {
            throw NoConvergenceError("find_root_complex: non-finite residual", z1, std::abs(f1));
        }
    }
    if (std::abs(f1) < tol) return z1;
    throw NoConvergenceError("find_root_complex: max_iter exceeded", z1, std::abs(f1));
}

namespace {

struct Echelon {
    int rank = 0;
    double min_rel_pivot = std::numeric_limits<double>::infinity();
};

Echelon row_echelon(Eigen::MatrixXd m, double tol) {
    Echelon out;
    const double scale = norm_inf(m);
    if (m.size() == 0 || scale == 0.0) {
        out.min_rel_pivot = 0.0;
        return out;
    }
    Eigen::Index row = 0;
    for (Eigen::Index c = 0; c < m.cols() && row < m.rows(); ++c) {
        Eigen::Index p;
        const double mag = m.col(c).tail(m.rows() - row).cwiseAbs().maxCoeff(&p);
        p += row;
        if (mag <= tol * scale) continue;
        out.min_rel_pivot = std::min(out.min_rel_pivot, mag / scale);
        m.row(row).swap(m.row(p));
        for (Eigen::Index r = row + 1; r < m.rows(); ++r) {
            const double factor = m(r, c) / m(row, c);
            m.row(r) -= factor * m.row(row);
        }
        ++row;
    }
    out.rank = static_cast<int>(row);
    return out;
}

}  // namespace

int rank_numeric(const Eigen::MatrixXd& a, double tol) {
    if (!(tol > 0.0)) throw Error("rank_numeric: tol must be positive");
    return row_echelon(a, tol).rank;
}

double min_relative_pivot(const Eigen::MatrixXd& a) {
    const Echelon e = row_echelon(a, 0.0);
    return e.rank == 0 ? 0.0 : e.min_rel_pivot;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw Error("solve_lyapunov: matrix must be square");
    const Eigen::Index n = a.rows();
    // Column-major vec: vec(A^T P) and vec(P A) as n^2 x n^2 operators.
    Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n * n, n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index row = i + j * n;
            for (Eigen::Index k = 0; k < n; ++k) {
                op(row, k + j * n) += a(k, i);
                op(row, i + k * n) += a(k, j);
            }
        }
    }
    const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(
        Eigen::MatrixXd::Identity(n, n).eval().data(), n * n);
    Eigen::VectorXd vec_p;
    try {
        vec_p = solve_linear(op, rhs);
    } catch (const SingularMatrixError&) {
        throw NotHurwitzError("solve_lyapunov: singular Lyapunov operator (A_K not Hurwitz)");
    }
    Eigen::MatrixXd p = Eigen::Map<Eigen::MatrixXd>(vec_p.data(), n, n);
    p = 0.5 * (p + p.transpose()).eval();
    return p;
}

cplx charpoly_eval(const Eigen::MatrixXd& a, cplx s) {
    if (a.rows() != a.cols()) throw Error("charpoly_eval: matrix must be square");
    Eigen::MatrixXcd shifted = -a.cast<cplx>();
    shifted.diagonal().array() += s;
    return PivotedLu<cplx>(std::move(shifted)).determinant();
}

GaussRule gauss_legendre_unit(int order) {
    if (order < 1) throw Error("gauss_legendre_unit: order must be >= 1");
    GaussRule rule{Eigen::VectorXd(order), Eigen::VectorXd(order)};
    for (int i = 0; i < order; ++i) {
        // Newton on P_order from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= order; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace waveforge
