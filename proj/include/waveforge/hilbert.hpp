#pragma once

#include <Eigen/Dense>

#include "waveforge/numerics.hpp"

namespace waveforge {

/// Sampled element (w1, w2) of the energy space; only w1' enters the inner
/// product, so the derivative is carried explicitly.
struct StateFunction {
    Eigen::VectorXd w1;
    Eigen::VectorXd dw1;
    Eigen::VectorXd w2;
};

/// Sampled primal/dual pair of the spectral basis, together with the scalar
/// data every consumer needs.
struct BasisVector {
    Eigen::VectorXcd e1, de1, e2;
    Eigen::VectorXcd f1, df1, f2;
    cplx trace0{};  // (e1)'(0)
    cplx traceL{};  // (f1)'(L)
    cplx a{};       // <a, f>
    cplx b{};       // <b, f>
};

/// <u, v>_H = int u1' conj(v1') + u2 conj(v2), composite Simpson.
template <class D1, class D2, class D3, class D4>
cplx inner_product_H(const Grid& grid, const Eigen::MatrixBase<D1>& du1, const Eigen::MatrixBase<D2>& u2,
                     const Eigen::MatrixBase<D3>& dv1, const Eigen::MatrixBase<D4>& v2) {
    const Eigen::VectorXcd integrand =
        du1.template cast<cplx>().cwiseProduct(dv1.template cast<cplx>().conjugate()) +
        u2.template cast<cplx>().cwiseProduct(v2.template cast<cplx>().conjugate());
    return quad_simpson(grid, integrand);
}

/// <W, f> against the dual half of a basis vector.
inline cplx inner_product_H(const Grid& grid, const StateFunction& w, const BasisVector& dual) {
    return inner_product_H(grid, w.dw1, w.w2, dual.df1, dual.f2);
}

/// <e, f> between the primal half of `u` and the dual half of `v`.
inline cplx primal_dual_product(const Grid& grid, const BasisVector& u, const BasisVector& v) {
    return inner_product_H(grid, u.de1, u.e2, v.df1, v.f2);
}

inline double norm_H(const Grid& grid, const StateFunction& w) {
    return std::sqrt(std::max(0.0, inner_product_H(grid, w.dw1, w.w2, w.dw1, w.w2).real()));
}

/// The actuation profiles a(x) = (x/(alpha L), 0) and b(x) = (0, -x/(alpha L)).
StateFunction actuation_a(const Grid& grid, double alpha);
StateFunction actuation_b(const Grid& grid, double alpha);

}  // namespace waveforge
