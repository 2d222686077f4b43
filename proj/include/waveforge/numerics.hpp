#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <functional>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

#include "waveforge/errors.hpp"

namespace waveforge {

using cplx = std::complex<double>;

/// Uniform sampling of [0, L] with an odd number of points, so that
/// composite Simpson applies on the whole interval.
class Grid {
public:
    Grid(int n_points, double length);

    int size() const noexcept { return static_cast<int>(x_.size()); }
    double length() const noexcept { return length_; }
    double spacing() const noexcept { return spacing_; }
    const Eigen::VectorXd& x() const noexcept { return x_; }
    const Eigen::VectorXd& simpson_weights() const noexcept { return weights_; }

    bool operator==(const Grid& other) const noexcept {
        return size() == other.size() && length_ == other.length_;
    }

private:
    double length_;
    double spacing_;
    Eigen::VectorXd x_;
    Eigen::VectorXd weights_;
};

/// Composite Simpson rule over the grid; real or complex samples.
template <class Derived>
typename Derived::Scalar quad_simpson(const Grid& grid, const Eigen::MatrixBase<Derived>& samples) {
    using Scalar = typename Derived::Scalar;
    if (samples.size() != grid.size()) {
        throw Error("quad_simpson: sample count does not match grid");
    }
    return (grid.simpson_weights().template cast<Scalar>().array() * samples.derived().array()).sum();
}

namespace detail {
inline bool all_finite(double v) { return std::isfinite(v); }
inline bool all_finite(const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& v) {
    return v.allFinite();
}
}  // namespace detail

/// One classical RK4 step of size h for field(t, x).
template <class State, class Field>
State rk4_step(Field&& field, double t, const State& x, double h) {
    const State k1 = field(t, x);
    const State k2 = field(t + 0.5 * h, State(x + (0.5 * h) * k1));
    const State k3 = field(t + 0.5 * h, State(x + (0.5 * h) * k2));
    const State k4 = field(t + h, State(x + h * k3));
    return State(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Fixed-step RK4 from t0 to t1; throws PropagationError on a non-finite state.
template <class State, class Field>
State integrate_rk4(Field&& field, State state, double t0, double t1, long n_steps) {
    if (n_steps < 1) throw Error("integrate_rk4: n_steps must be >= 1");
    const double h = (t1 - t0) / static_cast<double>(n_steps);
    for (long i = 0; i < n_steps; ++i) {
        state = rk4_step(field, t0 + static_cast<double>(i) * h, state, h);
        if (!detail::all_finite(state)) {
            throw PropagationError("integrate_rk4: non-finite state at step " + std::to_string(i), i);
        }
    }
    return state;
}

/// Secant iteration in the complex plane. Returns z with |fn(z)| < tol.
cplx find_root_complex(const std::function<cplx(cplx)>& fn, cplx guess, double tol, int max_iter,
                       cplx second_guess_offset = cplx(1e-3, 0.0));

/// LU factorization with partial pivoting that records pivots instead of
/// failing, so that the determinant of a singular matrix is available.
template <class Scalar>
class PivotedLu {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    explicit PivotedLu(Matrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
        if (lu_.rows() != lu_.cols()) throw Error("PivotedLu: matrix must be square");
        const Eigen::Index n = lu_.rows();
        norm_inf_ = lu_.cwiseAbs().rowwise().sum().maxCoeff();
        for (Eigen::Index i = 0; i < n; ++i) perm_[i] = i;
        min_pivot_ = n > 0 ? std::numeric_limits<double>::infinity() : 0.0;
        for (Eigen::Index c = 0; c < n; ++c) {
            Eigen::Index p;
            const double mag = lu_.col(c).tail(n - c).cwiseAbs().maxCoeff(&p);
            p += c;
            if (p != c) {
                lu_.row(c).swap(lu_.row(p));
                std::swap(perm_[c], perm_[p]);
                sign_ = -sign_;
            }
            min_pivot_ = std::min(min_pivot_, mag);
            if (mag == 0.0) continue;
            for (Eigen::Index r = c + 1; r < n; ++r) {
                lu_(r, c) /= lu_(c, c);
                lu_.row(r).tail(n - c - 1) -= lu_(r, c) * lu_.row(c).tail(n - c - 1);
            }
        }
    }

    Scalar determinant() const {
        Scalar det = Scalar(sign_);
        for (Eigen::Index i = 0; i < lu_.rows(); ++i) det *= lu_(i, i);
        return det;
    }

    double min_pivot() const noexcept { return min_pivot_; }
    double norm_inf() const noexcept { return norm_inf_; }
    bool singular(double rel_tol = 1e-13) const noexcept { return min_pivot_ <= rel_tol * norm_inf_; }

    Vector solve(const Vector& b) const {
        const Eigen::Index n = lu_.rows();
        if (b.size() != n) throw Error("PivotedLu::solve: dimension mismatch");
        if (singular()) {
            throw SingularMatrixError("solve_linear: pivot " + std::to_string(min_pivot_) +
                                      " below 1e-13*||A||_inf");
        }
        Vector y(n);
        for (Eigen::Index i = 0; i < n; ++i) y[i] = b[perm_[i]];
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < i; ++j) y[i] -= lu_(i, j) * y[j];
        }
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            for (Eigen::Index j = i + 1; j < n; ++j) y[i] -= lu_(i, j) * y[j];
            y[i] /= lu_(i, i);
        }
        return y;
    }

private:
    Matrix lu_;
    Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1> perm_;
    double norm_inf_ = 0.0;
    double min_pivot_ = 0.0;
    int sign_ = 1;
};

template <class DerivedA, class DerivedB>
auto solve_linear(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    using Lu = PivotedLu<Scalar>;
    return Lu(typename Lu::Matrix(a)).solve(typename Lu::Vector(b));
}

/// Number of pivots exceeding tol*||A||_inf under row-echelon reduction
/// with partial pivoting.
int rank_numeric(const Eigen::MatrixXd& a, double tol);

/// Smallest pivot magnitude relative to ||A||_inf of the same reduction,
/// reported alongside the rank as a conditioning margin.
double min_relative_pivot(const Eigen::MatrixXd& a);

/// Symmetric P with A^T P + P A = -I, via the Kronecker-vectorized system.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a);

/// det(sI - A).
cplx charpoly_eval(const Eigen::MatrixXd& a, cplx s);

inline double norm_inf(const Eigen::MatrixXd& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

/// Gauss-Legendre nodes and weights mapped to [0, 1].
struct GaussRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};
GaussRule gauss_legendre_unit(int order);

}  // namespace waveforge
