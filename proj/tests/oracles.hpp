// Independent reference implementations used only by tests. These must stay
// decoupled from the library code paths they validate.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "prbfn/current_optimizer.hpp"
#include "prbfn/pixel_network.hpp"

namespace oracle {

// J0 by its power series sum_k (-1)^k (x^2/4)^k / (k!)^2 in quad precision.
// The largest term at x = 40 is ~2e15, so the 1.9e-34 quad epsilon leaves
// absolute accuracy near 1e-18 over [0, 40].
inline double j0_series(double x) {
    const __float128 x2 = static_cast<__float128>(x) * static_cast<__float128>(x);
    __float128 term = 1.0;
    __float128 sum = 1.0;
    for (int k = 1; k < 400; ++k) {
        term *= -x2 / (4.0 * static_cast<__float128>(k) * static_cast<__float128>(k));
        sum += term;
        __float128 mag = term < 0 ? -term : term;
        if (mag < static_cast<__float128>(1e-40)) break;
    }
    return static_cast<double>(sum);
}

// J0 by Miller's downward recurrence, normalized with
// J0 + 2*J2 + 2*J4 + ... = 1. Complements the series oracle, whose leading
// term (~e^x) outgrows quad precision beyond x ~ 50.
inline double j0_miller(double x) {
    if (x < 0) x = -x;
    if (x < 1.0) return j0_series(x);
    const int start = 2 * (static_cast<int>(1.2 * x) + 40);
    double jp = 0.0;           // J_{n+1}
    double jc = 1e-300;        // J_n, arbitrary normalization
    double j0 = 0.0;
    double norm = 0.0;
    for (int n = start; n >= 1; --n) {
        const double jm = (2.0 * n / x) * jc - jp;
        jp = jc;
        jc = jm;
        if ((n - 1) % 2 == 0) norm += (n - 1 == 0) ? jc : 2.0 * jc;
        if (n - 1 == 0) j0 = jc;
        if (std::abs(jc) > 1e250) {  // rescale to dodge overflow
            jc *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
        }
    }
    return j0 / norm;
}

// First positive root of J0 via bisection on the series.
inline double j0_first_root() {
    double lo = 2.0, hi = 3.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (j0_series(lo) * j0_series(mid) <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Element-by-element objective evaluation, no matrix algebra shortcuts.
inline double objective_double_loop(const Eigen::MatrixXcd& B, const Eigen::MatrixXd& C) {
    const Eigen::Index n = B.cols();
    double f = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            std::complex<double> g(0.0, 0.0);
            for (Eigen::Index m = 0; m < B.rows(); ++m) {
                g += std::conj(B(m, i)) * B(m, j);
            }
            const double d = std::abs(g) - C(i, j);
            f += d * d;
        }
    }
    return f;
}

// Central finite differences of the objective with respect to the real and
// imaginary part of every entry, packed as a complex matrix
// (df/dRe + j*df/dIm).
inline Eigen::MatrixXcd fd_gradient(const Eigen::MatrixXcd& B, const Eigen::MatrixXd& C,
                                    double h = 1e-6) {
    Eigen::MatrixXcd g(B.rows(), B.cols());
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
        for (Eigen::Index i = 0; i < B.rows(); ++i) {
            Eigen::MatrixXcd Bp = B, Bm = B;
            Bp(i, j) += h;
            Bm(i, j) -= h;
            const double d_re = (prbfn::objective(Bp, C) - prbfn::objective(Bm, C)) / (2.0 * h);
            Bp = B;
            Bm = B;
            Bp(i, j) += std::complex<double>(0.0, h);
            Bm(i, j) -= std::complex<double>(0.0, h);
            const double d_im = (prbfn::objective(Bp, C) - prbfn::objective(Bm, C)) / (2.0 * h);
            g(i, j) = {d_re, d_im};
        }
    }
    return g;
}

// Feed impedance by solving the full port system of the loaded network in
// one monolithic linear solve (unknowns: feed voltages and internal
// currents), column by column. Independent of the Schur-complement route.
inline Eigen::MatrixXcd full_solve_feed_impedance(const prbfn::PixelNetwork& net,
                                                  const prbfn::SwitchState& x,
                                                  const prbfn::SwitchModel& sw,
                                                  std::size_t f_index) {
    const int nf = net.n_feed;
    const int q = net.q;
    const double f_hz = net.freqs_hz.at(f_index);
    const Eigen::MatrixXcd& Z = net.z.at(f_index);

    Eigen::MatrixXcd zpr(nf, nf);
    for (int col = 0; col < nf; ++col) {
        // unknown u = [v_F (nf); i_I (q)], excitation i_F = e_col
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(nf + q, nf + q);
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(nf + q);
        for (int r = 0; r < nf; ++r) {
            A(r, r) = 1.0;  // v_F
            for (int c = 0; c < q; ++c) A(r, nf + c) = -Z(r, nf + c);
            rhs(r) = Z(r, col);
        }
        for (int r = 0; r < q; ++r) {
            for (int c = 0; c < q; ++c) A(nf + r, nf + c) = Z(nf + r, nf + c);
            const std::complex<double> load = x.bits.at(static_cast<std::size_t>(r))
                                                  ? sw.on_impedance(f_hz)
                                                  : sw.off_impedance(f_hz);
            A(nf + r, nf + r) += load;
            rhs(nf + r) = -Z(nf + r, col);
        }
        const Eigen::VectorXcd u = A.fullPivLu().solve(rhs);
        zpr.col(col) = u.head(nf);
    }
    return zpr;
}

}  // namespace oracle
