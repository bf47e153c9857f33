#pragma once

#include <Eigen/Dense>

namespace netsim {

/// Solves the continuous-time Lyapunov equation F' X + X F + W = 0
/// (Kronecker formulation; sizes here are small).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& f, const Eigen::MatrixXd& w);

/// Solves the continuous-time algebraic Riccati equation
///   A' P + P A - P B R^{-1} B' P + Q = 0
/// for the stabilizing P >= 0. A stabilizing initial gain is obtained from
/// the stable invariant subspace of the Hamiltonian matrix; the solution is
/// then polished by Newton-Kleinman iterations (Lyapunov solves) until the
/// residual is below 1e-10. Throws if no stabilizing solution is found.
Eigen::MatrixXd solve_are(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          const Eigen::MatrixXd& q, const Eigen::MatrixXd& r);

/// Max-abs residual of the ARE at P.
double are_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                    const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                    const Eigen::MatrixXd& p);

}  // namespace netsim
