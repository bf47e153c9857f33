#include "netsim/qp.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace netsim {

namespace {

constexpr double kPrimalReg = 1e-11;
constexpr double kDualReg = 1e-10;

double inf_norm(const Eigen::VectorXd& v) {
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

// Largest step in [0, 1] keeping v + a*dv >= (1 - tau) * v.
double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, double tau) {
    double a = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -tau * v[i] / dv[i]);
    return a;
}

}  // namespace

QpSolution QpSolver::solve(const SparseQp& qp, const Eigen::VectorXd* z_hint) {
    const Eigen::Index n = qp.h.rows();
    const Eigen::Index me = qp.eq.rows();
    const Eigen::Index mi = qp.ineq.rows();
    const Eigen::Index dim = n + me;

    QpSolution sol;
    sol.z = (z_hint && z_hint->size() == n) ? *z_hint : Eigen::VectorXd::Zero(n);
    sol.eq_dual = Eigen::VectorXd::Zero(me);
    sol.ineq_dual = Eigen::VectorXd::Ones(mi);
    sol.slack = (qp.ineq_rhs - qp.ineq * sol.z).cwiseMax(1.0);

    const Eigen::SparseMatrix<double> eq_t = qp.eq.transpose();
    const Eigen::SparseMatrix<double> ineq_t = qp.ineq.transpose();

    Eigen::SparseMatrix<double> kkt(dim, dim);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(qp.h.nonZeros() + 4 * qp.ineq.nonZeros() +
                                      2 * qp.eq.nonZeros() + dim));

    Eigen::VectorXd rd(n), rp(me), ri(mi), rmu(mi);
    Eigen::VectorXd rhs(dim), d(dim), dz(n), dnu(me), dw(mi), dlam(mi);
    Eigen::VectorXd dw_aff(mi), dlam_aff(mi);

    for (int it = 0; it < opt_.max_iters; ++it) {
        rd = qp.h * sol.z + qp.g + eq_t * sol.eq_dual + ineq_t * sol.ineq_dual;
        rp = qp.eq * sol.z - qp.eq_rhs;
        ri = qp.ineq * sol.z + sol.slack - qp.ineq_rhs;
        const double mu = mi ? sol.slack.dot(sol.ineq_dual) / double(mi) : 0.0;

        sol.residual = std::max({inf_norm(rd), inf_norm(rp), inf_norm(ri)});
        sol.complementarity = mu;
        sol.iterations = it;
        if (sol.residual <= opt_.tol && mu <= opt_.tol) {
            sol.ok = true;
            return sol;
        }

        // sigma = lambda / w, elementwise
        Eigen::VectorXd sigma = sol.ineq_dual.cwiseQuotient(sol.slack);

        // Assemble [[H + C' Sigma C + dp I, E'], [E, -dd I]].
        trips.clear();
        for (int k = 0; k < qp.h.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator v(qp.h, k); v; ++v)
                trips.emplace_back(int(v.row()), int(v.col()), v.value());
        // C' Sigma C: gather the nonzeros of each inequality row once, then
        // add the sigma-scaled outer products.
        {
            static thread_local std::vector<std::vector<std::pair<int, double>>> rows;
            rows.assign(static_cast<size_t>(mi), {});
            for (int k = 0; k < qp.ineq.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator v(qp.ineq, k); v; ++v)
                    rows[static_cast<size_t>(v.row())].emplace_back(int(v.col()), v.value());
            for (Eigen::Index r = 0; r < mi; ++r)
                for (auto [ci, cv] : rows[static_cast<size_t>(r)])
                    for (auto [cj, cw] : rows[static_cast<size_t>(r)])
                        trips.emplace_back(ci, cj, sigma[r] * cv * cw);
        }
        for (Eigen::Index i = 0; i < n; ++i) trips.emplace_back(int(i), int(i), kPrimalReg);
        for (int k = 0; k < qp.eq.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator v(qp.eq, k); v; ++v) {
                trips.emplace_back(int(n + v.row()), int(v.col()), v.value());
                trips.emplace_back(int(v.col()), int(n + v.row()), v.value());
            }
        for (Eigen::Index i = 0; i < me; ++i)
            trips.emplace_back(int(n + i), int(n + i), -kDualReg);
        kkt.setZero();
        kkt.setFromTriplets(trips.begin(), trips.end());

        if (!analyzed_ || analyzed_dim_ != dim) {
            ldlt_.analyzePattern(kkt);
            analyzed_ = true;
            analyzed_dim_ = dim;
        }
        ldlt_.factorize(kkt);
        if (ldlt_.info() != Eigen::Success) {
            sol.ok = false;
            return sol;
        }

        auto solve_kkt = [&](const Eigen::VectorXd& b) {
            Eigen::VectorXd s = ldlt_.solve(b);
            // one step of iterative refinement against the assembled matrix
            Eigen::VectorXd resid = b - kkt * s;
            s += ldlt_.solve(resid);
            return s;
        };

        auto directions = [&](const Eigen::VectorXd& rmu_vec) {
            // rhs_z = -rd + C'(W^{-1} rmu - Sigma ri)
            Eigen::VectorXd tmp =
                rmu_vec.cwiseQuotient(sol.slack) - sigma.cwiseProduct(ri);
            rhs.head(n) = -rd + ineq_t * tmp;
            rhs.tail(me) = -rp;
            d = solve_kkt(rhs);
            dz = d.head(n);
            dnu = d.tail(me);
            dw = -ri - qp.ineq * dz;
            dlam = (-rmu_vec - sol.ineq_dual.cwiseProduct(dw)).cwiseQuotient(sol.slack);
        };

        // Affine (predictor) step.
        rmu = sol.slack.cwiseProduct(sol.ineq_dual);
        directions(rmu);
        const double a_pri_aff = max_step(sol.slack, dw, 1.0);
        const double a_dua_aff = max_step(sol.ineq_dual, dlam, 1.0);
        const double mu_aff =
            mi ? (sol.slack + a_pri_aff * dw).dot(sol.ineq_dual + a_dua_aff * dlam) / double(mi)
               : 0.0;
        double sig = 0.0;
        if (mu > 0.0) {
            sig = std::pow(mu_aff / mu, 3);
            sig = std::clamp(sig, 1e-8, 1.0);
        }
        dw_aff = dw;
        dlam_aff = dlam;

        // Corrector step.
        rmu = sol.slack.cwiseProduct(sol.ineq_dual) + dw_aff.cwiseProduct(dlam_aff) -
              Eigen::VectorXd::Constant(mi, sig * mu);
        directions(rmu);

        const double tau = std::max(0.99, 1.0 - 0.1 * mu);
        const double a_pri = max_step(sol.slack, dw, tau);
        const double a_dua = max_step(sol.ineq_dual, dlam, tau);

        if (a_pri < 1e-11 && a_dua < 1e-11) break;  // stalled

        sol.z += a_pri * dz;
        sol.slack += a_pri * dw;
        sol.eq_dual += a_dua * dnu;
        sol.ineq_dual += a_dua * dlam;

        if (!sol.z.allFinite()) break;
    }

    // Final residual check in case the last accepted step reached tolerance.
    rd = qp.h * sol.z + qp.g + eq_t * sol.eq_dual + ineq_t * sol.ineq_dual;
    rp = qp.eq * sol.z - qp.eq_rhs;
    ri = qp.ineq * sol.z + sol.slack - qp.ineq_rhs;
    sol.residual = std::max({inf_norm(rd), inf_norm(rp), inf_norm(ri)});
    sol.complementarity = mi ? sol.slack.dot(sol.ineq_dual) / double(mi) : 0.0;
    sol.ok = sol.residual <= opt_.tol && sol.complementarity <= opt_.tol;
    return sol;
}

}  // namespace netsim
