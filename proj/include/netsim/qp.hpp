#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace netsim {

/// Convex QP in standard form:
///   min 1/2 z'Hz + g'z   s.t.  Ez = e,  Cz <= c
/// H must be symmetric positive semidefinite (stored full).
struct SparseQp {
    Eigen::SparseMatrix<double> h;
    Eigen::VectorXd g;
    Eigen::SparseMatrix<double> eq;
    Eigen::VectorXd eq_rhs;
    Eigen::SparseMatrix<double> ineq;
    Eigen::VectorXd ineq_rhs;
};

struct QpSolution {
    Eigen::VectorXd z;
    Eigen::VectorXd eq_dual;
    Eigen::VectorXd ineq_dual;   // >= 0
    Eigen::VectorXd slack;       // c - Cz >= 0
    int iterations = 0;
    double residual = 0.0;       // max of stationarity and primal feasibility
    double complementarity = 0.0;
    bool ok = false;
};

/// Primal-dual interior point method (Mehrotra predictor-corrector) on the
/// reduced KKT system, solved by a sparse LDLT whose symbolic factorization
/// is reused across calls with an identical sparsity pattern.
class QpSolver {
public:
    struct Options {
        double tol = 1e-9;
        int max_iters = 60;
    };

    QpSolver() = default;
    explicit QpSolver(const Options& opt) : opt_(opt) {}

    QpSolution solve(const SparseQp& qp, const Eigen::VectorXd* z_hint = nullptr);

private:
    Options opt_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                          Eigen::AMDOrdering<int>>
        ldlt_;
    bool analyzed_ = false;
    Eigen::Index analyzed_dim_ = -1;
};

}  // namespace netsim
