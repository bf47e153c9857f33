#include "netsim/riccati.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace netsim {

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& f, const Eigen::MatrixXd& w) {
    const long n = f.rows();
    // Column-major vec: vec(F'X) = (I kron F') vec(X), vec(XF) = (F' kron I) vec(X).
    Eigen::MatrixXd k(n * n, n * n);
    k.setZero();
    const Eigen::MatrixXd ft = f.transpose();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            k.block(i * n, j * n, n, n) = ft(i, j) * id;
            if (i == j) k.block(i * n, j * n, n, n) += ft;
        }
    Eigen::VectorXd rhs(n * n);
    for (long j = 0; j < n; ++j) rhs.segment(j * n, n) = -w.col(j);
    Eigen::VectorXd x = k.fullPivLu().solve(rhs);
    Eigen::MatrixXd out(n, n);
    for (long j = 0; j < n; ++j) out.col(j) = x.segment(j * n, n);
    return 0.5 * (out + out.transpose().eval());
}

double are_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                    const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                    const Eigen::MatrixXd& p) {
    const Eigen::MatrixXd res = a.transpose() * p + p * a -
                                p * b * r.ldlt().solve(b.transpose() * p) + q;
    return res.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd solve_are(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          const Eigen::MatrixXd& q, const Eigen::MatrixXd& r) {
    const long n = a.rows();
    if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n ||
        r.rows() != b.cols() || r.cols() != b.cols())
        throw std::runtime_error("solve_are: inconsistent dimensions");

    const Eigen::MatrixXd rinv_bt = r.ldlt().solve(b.transpose());
    const Eigen::MatrixXd s = b * rinv_bt;  // B R^{-1} B'

    // Stable invariant subspace of the Hamiltonian.
    Eigen::MatrixXd ham(2 * n, 2 * n);
    ham << a, -s, -q, -a.transpose();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(ham.cast<std::complex<double>>());
    if (es.info() != Eigen::Success) throw std::runtime_error("solve_are: eigensolver failed");

    Eigen::MatrixXcd basis(2 * n, n);
    long found = 0;
    for (long i = 0; i < 2 * n; ++i) {
        if (es.eigenvalues()[i].real() < 0.0) {
            if (found == n) throw std::runtime_error("solve_are: too many stable eigenvalues");
            basis.col(found++) = es.eigenvectors().col(i);
        }
    }
    if (found != n) throw std::runtime_error("solve_are: no stabilizing solution");

    const Eigen::MatrixXcd x = basis.topRows(n);
    const Eigen::MatrixXcd y = basis.bottomRows(n);
    // P = Y X^{-1}, taken via P' = X^{-T} Y'.
    Eigen::MatrixXd p =
        x.transpose().partialPivLu().solve(y.transpose()).transpose().eval().real();
    p = 0.5 * (p + p.transpose().eval());

    // Newton-Kleinman polish: each step solves a Lyapunov equation for the
    // closed loop A - S P, quadratically convergent from a stabilizing P.
    for (int it = 0; it < 25; ++it) {
        const double res = are_residual(a, b, q, r, p);
        if (res <= 1e-10) break;
        const Eigen::MatrixXd k = rinv_bt * p;              // R^{-1} B' P
        const Eigen::MatrixXd acl = a - b * k;
        const Eigen::MatrixXd w = q + k.transpose() * r * k;
        p = solve_lyapunov(acl, w);
    }

    if (are_residual(a, b, q, r, p) > 1e-8)
        throw std::runtime_error("solve_are: residual did not converge");
    // Stabilizing check.
    const Eigen::MatrixXd acl = a - b * (rinv_bt * p);
    Eigen::EigenSolver<Eigen::MatrixXd> cls(acl);
    for (long i = 0; i < n; ++i)
        if (cls.eigenvalues()[i].real() >= 0.0)
            throw std::runtime_error("solve_are: closed loop not Hurwitz");
    return p;
}

}  // namespace netsim
