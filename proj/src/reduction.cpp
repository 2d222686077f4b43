#include "waveforge/reduction.hpp"

#include <algorithm>

namespace waveforge {

Eigen::VectorXcd project(const ModeBasis& basis, const StateFunction& w) {
    if (w.w1.size() != basis.grid.size() || w.dw1.size() != basis.grid.size() ||
        w.w2.size() != basis.grid.size()) {
        throw Error("project: state function is not sampled on the basis grid");
    }
    const int N = basis.n_modes;
    Eigen::VectorXcd c(basis.size());
    for (int k = -N; k <= N; ++k) c[k + N] = inner_product_H(basis.grid, w, basis.slot(k));
    for (int k = -basis.n0; k <= basis.n0; ++k) c[k + N] = c[k + N].real();
    return c;
}

StateFunction reconstruct(const ModeBasis& basis, const Eigen::VectorXcd& coeffs) {
    if (coeffs.size() != basis.size()) throw Error("reconstruct: coefficient count mismatch");
    const int n = basis.grid.size();
    const int N = basis.n_modes;
    Eigen::VectorXcd w1 = Eigen::VectorXcd::Zero(n), dw1 = w1, w2 = w1;
    for (int k = -N; k <= N; ++k) {
        const BasisVector& e = basis.slot(k);
        w1 += coeffs[k + N] * e.e1;
        dw1 += coeffs[k + N] * e.de1;
        w2 += coeffs[k + N] * e.e2;
    }
    return {w1.real(), dw1.real(), w2.real()};
}

StateFunction slot_function(const ModeBasis& basis, int k) {
    const BasisVector& e = basis.slot(k);
    return {e.e1.real(), e.de1.real(), e.e2.real()};
}

TailConstants tail_constants(const ModeBasis& basis, int n_tail) {
    const int available = basis.n_modes + static_cast<int>(basis.extension.size());
    if (n_tail < 0) n_tail = available;
    if (n_tail > available) {
        throw Error("tail_constants: n_tail = " + std::to_string(n_tail) + " exceeds the " +
                    std::to_string(available) + " shot modes");
    }
    TailConstants t;
    t.n_tail = n_tail;
    for (int k = basis.n0 + 1; k <= n_tail; ++k) {
        cplx lambda, trace0, a, b;
        if (k <= basis.n_modes) {
            const Mode& m = basis.mode(k);
            lambda = m.lambda, trace0 = m.trace0, a = m.a, b = m.b;
        } else {
            const TailTerm& e = basis.extension[static_cast<std::size_t>(k - basis.n_modes - 1)];
            lambda = e.lambda, trace0 = e.trace0, a = e.a, b = e.b;
        }
        const double ta = -2.0 * (trace0 * a / lambda).real();
        t.alpha0 += ta;
        t.beta0 += -2.0 * (trace0 * b / lambda).real();
        t.last_term = std::abs(ta);
    }
    return t;
}

double integral_shift(const ModeBasis& basis, const Eigen::VectorXcd& coeffs) {
    if (coeffs.size() != basis.size()) throw Error("integral_shift: coefficient count mismatch");
    const int N = basis.n_modes;
    cplx s = 0.0;
    for (int k = basis.n0 + 1; k <= N; ++k) {
        const Mode& p = basis.mode(k);
        const Mode& q = basis.mode(-k);
        s += p.trace0 * coeffs[k + N] / p.lambda + q.trace0 * coeffs[-k + N] / q.lambda;
    }
    return s.real();
}

double xi_from_zeta(const ModeBasis& basis, double zeta, const Eigen::VectorXcd& coeffs) {
    return zeta - integral_shift(basis, coeffs);
}

double zeta_from_xi(const ModeBasis& basis, double xi, const Eigen::VectorXcd& coeffs) {
    return xi + integral_shift(basis, coeffs);
}

ReducedModel assemble_reduced_model(const ModeBasis& basis, const TailConstants& tail) {
    const int n0 = basis.n0;
    const int nb = 2 * n0 + 1;
    const int m = nb + 2;
    const Grid& grid = basis.grid;

    // Image of each recombined block vector under the operator. Since
    // (e1)'' = (lambda^2 - f'(y_e)) e1, the operator maps e_k to
    // (e2, lambda^2 e1) = lambda e_k; recombine that like the functions.
    std::vector<Eigen::VectorXcd> img_de1(static_cast<std::size_t>(nb)), img_e2(static_cast<std::size_t>(nb));
    for (int k = -n0; k <= n0; ++k) {
        const Mode& mode = basis.mode(std::abs(k));
        const Eigen::VectorXcd de = mode.lambda * mode.de1;
        const Eigen::VectorXcd s2 = mode.lambda * mode.e2;
        const auto idx = static_cast<std::size_t>(k + n0);
        if (k >= 0) {
            img_de1[idx] = de.real().cast<cplx>();
            img_e2[idx] = s2.real().cast<cplx>();
        } else {
            img_de1[idx] = de.imag().cast<cplx>();
            img_e2[idx] = s2.imag().cast<cplx>();
        }
    }

    ReducedModel r;
    r.n0 = n0;
    r.alpha0 = tail.alpha0;
    r.beta0 = tail.beta0;
    r.A0.resize(nb, nb);
    r.a_vec.resize(nb);
    r.b_vec.resize(nb);
    double residue = 0.0;
    for (int i = 0; i < nb; ++i) {
        const BasisVector& fi = basis.block[static_cast<std::size_t>(i)];
        for (int j = 0; j < nb; ++j) {
            const cplx v = inner_product_H(grid, img_de1[static_cast<std::size_t>(j)],
                                           img_e2[static_cast<std::size_t>(j)], fi.df1, fi.f2);
            residue = std::max(residue, std::abs(v.imag()));
            r.A0(i, j) = v.real();
        }
        residue = std::max({residue, std::abs(fi.a.imag()), std::abs(fi.b.imag()), std::abs(fi.trace0.imag())});
        r.a_vec[i] = fi.a.real();
        r.b_vec[i] = fi.b.real();
    }
    r.imag_residue = residue;
    if (residue > 1e-6) {
        throw SpectrumError("assemble_reduced_model: imaginary residue " + std::to_string(residue) +
                            " after real recombination");
    }

    r.L1.resize(nb + 1);
    r.L1[0] = tail.alpha0;
    for (int i = 0; i < nb; ++i) r.L1[i + 1] = basis.block[static_cast<std::size_t>(i)].trace0.real();

    r.A = Eigen::MatrixXd::Zero(m, m);
    r.A.block(1, 0, nb, 1) = r.a_vec;
    r.A.block(1, 1, nb, nb) = r.A0;
    r.A.block(m - 1, 0, 1, nb + 1) = r.L1;
    r.B.resize(m);
    r.B[0] = 1.0;
    r.B.segment(1, nb) = r.b_vec;
    r.B[m - 1] = tail.beta0;
    return r;
}

}  // namespace waveforge
