#include "netsim/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "netsim/riccati.hpp"

namespace netsim {

std::vector<double> OcpConfig::grid() const {
    if (n_stages <= 0 || n_fine < 0 || n_fine > n_stages)
        throw std::runtime_error("ocp: inconsistent grid (stage counts)");
    if (fine_dt <= 0.0 || (n_fine < n_stages && coarse_dt <= 0.0))
        throw std::runtime_error("ocp: inconsistent grid (step lengths)");
    double cdt = coarse_dt;
    if (stretch_coarse_to > 0.0) {
        const int nc = n_stages - n_fine;
        if (nc <= 0) throw std::runtime_error("ocp: cannot stretch grid without coarse stages");
        cdt = (stretch_coarse_to - double(n_fine) * fine_dt) / double(nc);
        if (cdt <= 0.0) throw std::runtime_error("ocp: stretch target shorter than fine grid");
    }
    std::vector<double> g(static_cast<size_t>(n_stages));
    for (int k = 0; k < n_stages; ++k) g[static_cast<size_t>(k)] = k < n_fine ? fine_dt : cdt;
    return g;
}

double OcpConfig::horizon() const {
    double t = 0.0;
    for (double d : grid()) t += d;
    return t;
}

namespace {

// Variable layout: per stage k < N a block [x_k(4), u_k, s_lb_k, s_ub_k],
// then the terminal state x_N. Keeps the KKT system narrowly banded.
inline int ix(int k) { return 7 * k; }
inline int iu(int k) { return 7 * k + 4; }
inline int isl(int k) { return 7 * k + 5; }
inline int isu(int k) { return 7 * k + 6; }

}  // namespace

OcpSolver::OcpSolver(const OcpConfig& cfg, const PendulumParams& params)
    : cfg_(cfg), params_(params), dt_(cfg.grid()) {
    if (!(cfg_.r_input > 0.0)) throw std::runtime_error("ocp: R must be positive");
    if ((cfg_.q_diag.array() < 0.0).any()) throw std::runtime_error("ocp: Q must be >= 0");
    if (!(cfg_.beta > 0.0)) throw std::runtime_error("ocp: beta must be positive");
    if (!(cfg_.u_min < cfg_.u_max)) throw std::runtime_error("ocp: empty input box");
    if (!(cfg_.theta_min < cfg_.theta_max)) throw std::runtime_error("ocp: empty theta band");
    if (!params_.valid()) throw std::runtime_error("ocp: invalid pendulum parameters");

    // Terminal penalty from the Riccati equation at the upright equilibrium.
    Eigen::Matrix4d a;
    Eigen::Vector4d b;
    linearize(State4{}, 0.0, params_, a, b);
    Eigen::MatrixXd r(1, 1);
    r(0, 0) = cfg_.r_input;
    p_ = solve_are(a, b, cfg_.q_diag.asDiagonal().toDenseMatrix(), r);

    const int n_st = cfg_.n_stages;
    const int n = 7 * n_st + 4;

    // Constant Hessian and gradient.
    std::vector<Eigen::Triplet<double>> ht;
    grad_ = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n_st; ++k) {
        const double dt = dt_[static_cast<size_t>(k)];
        for (int i = 0; i < 4; ++i)
            ht.emplace_back(ix(k) + i, ix(k) + i, dt * cfg_.q_diag[i]);
        ht.emplace_back(iu(k), iu(k), dt * cfg_.r_input);
        ht.emplace_back(isl(k), isl(k), 2.0 * dt * cfg_.slack_quad_weight);
        ht.emplace_back(isu(k), isu(k), 2.0 * dt * cfg_.slack_quad_weight);
        grad_[isl(k)] = dt * cfg_.slack_lin_weight;
        grad_[isu(k)] = dt * cfg_.slack_lin_weight;
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            ht.emplace_back(7 * n_st + i, 7 * n_st + j, cfg_.beta * p_(i, j));
    hess_.resize(n, n);
    hess_.setFromTriplets(ht.begin(), ht.end());

    // Constant inequalities: input box, slack nonnegativity, soft theta band.
    std::vector<Eigen::Triplet<double>> ct;
    ineq_rhs_.resize(6 * n_st);
    int row = 0;
    for (int k = 0; k < n_st; ++k) {
        ct.emplace_back(row, iu(k), 1.0);
        ineq_rhs_[row++] = cfg_.u_max;
        ct.emplace_back(row, iu(k), -1.0);
        ineq_rhs_[row++] = -cfg_.u_min;
        ct.emplace_back(row, isl(k), -1.0);
        ineq_rhs_[row++] = 0.0;
        ct.emplace_back(row, isu(k), -1.0);
        ineq_rhs_[row++] = 0.0;
        ct.emplace_back(row, ix(k) + 0, 1.0);
        ct.emplace_back(row, isu(k), -1.0);
        ineq_rhs_[row++] = cfg_.theta_max;
        ct.emplace_back(row, ix(k) + 0, -1.0);
        ct.emplace_back(row, isl(k), -1.0);
        ineq_rhs_[row++] = -cfg_.theta_min;
    }
    ineq_.resize(6 * n_st, n);
    ineq_.setFromTriplets(ct.begin(), ct.end());
}

double OcpSolver::objective(const std::vector<State4>& x, const std::vector<double>& u,
                            const std::vector<std::pair<double, double>>& slack) const {
    const int n_st = cfg_.n_stages;
    double f = 0.0;
    for (int k = 0; k < n_st; ++k) {
        const double dt = dt_[static_cast<size_t>(k)];
        const Eigen::Vector4d xv = x[static_cast<size_t>(k)].vec();
        f += dt * (0.5 * xv.dot(cfg_.q_diag.asDiagonal() * xv) +
                   0.5 * cfg_.r_input * u[static_cast<size_t>(k)] * u[static_cast<size_t>(k)]);
        const auto [sl, su] = slack[static_cast<size_t>(k)];
        f += dt * (cfg_.slack_quad_weight * (sl * sl + su * su) +
                   cfg_.slack_lin_weight * (sl + su));
    }
    const Eigen::Vector4d xn = x[static_cast<size_t>(n_st)].vec();
    f += cfg_.beta * 0.5 * xn.dot(p_ * xn);
    return f;
}

OcpSolution OcpSolver::initial_guess(const State4& x0) const {
    const int n_st = cfg_.n_stages;
    OcpSolution s;
    s.x.resize(static_cast<size_t>(n_st) + 1);
    s.u.assign(static_cast<size_t>(n_st), 0.0);
    s.slack.assign(static_cast<size_t>(n_st), {0.0, 0.0});
    const Eigen::Vector4d v0 = x0.vec();
    for (int k = 0; k <= n_st; ++k) {
        const double w = 1.0 - double(k) / double(n_st);
        s.x[static_cast<size_t>(k)] = State4::from_vec(w * v0);
    }
    for (int k = 0; k < n_st; ++k) {
        const double th = s.x[static_cast<size_t>(k)].theta;
        s.slack[static_cast<size_t>(k)] = {std::max(0.0, cfg_.theta_min - th),
                                           std::max(0.0, th - cfg_.theta_max)};
    }
    return s;
}

OcpSolution OcpSolver::shifted_guess(const OcpSolution& prev, double elapsed,
                                     const State4& x0) const {
    const int n_st = cfg_.n_stages;
    // Node times of the grid.
    std::vector<double> node(static_cast<size_t>(n_st) + 1, 0.0);
    for (int k = 0; k < n_st; ++k)
        node[static_cast<size_t>(k) + 1] = node[static_cast<size_t>(k)] + dt_[static_cast<size_t>(k)];
    const double t_end = node.back();

    auto u_at = [&](double t) -> double {
        if (t < 0.0) t = 0.0;
        if (t >= t_end) return 0.0;
        for (int k = 0; k < n_st; ++k)
            if (t < node[static_cast<size_t>(k) + 1]) return prev.u[static_cast<size_t>(k)];
        return 0.0;
    };
    auto x_at = [&](double t) -> State4 {
        if (t <= 0.0) return prev.x.front();
        if (t >= t_end) return prev.x.back();
        for (int k = 0; k < n_st; ++k) {
            const double t0 = node[static_cast<size_t>(k)], t1 = node[static_cast<size_t>(k) + 1];
            if (t < t1) {
                const double w = (t - t0) / (t1 - t0);
                return State4::from_vec((1.0 - w) * prev.x[static_cast<size_t>(k)].vec() +
                                        w * prev.x[static_cast<size_t>(k) + 1].vec());
            }
        }
        return prev.x.back();
    };

    OcpSolution s;
    s.x.resize(static_cast<size_t>(n_st) + 1);
    s.u.resize(static_cast<size_t>(n_st));
    s.slack.assign(static_cast<size_t>(n_st), {0.0, 0.0});
    s.x[0] = x0;
    for (int k = 1; k <= n_st; ++k) s.x[static_cast<size_t>(k)] = x_at(node[static_cast<size_t>(k)] + elapsed);
    for (int k = 0; k < n_st; ++k)
        s.u[static_cast<size_t>(k)] =
            std::clamp(u_at(node[static_cast<size_t>(k)] + elapsed), cfg_.u_min, cfg_.u_max);
    for (int k = 0; k < n_st; ++k) {
        const double th = s.x[static_cast<size_t>(k)].theta;
        s.slack[static_cast<size_t>(k)] = {std::max(0.0, cfg_.theta_min - th),
                                           std::max(0.0, th - cfg_.theta_max)};
    }
    return s;
}

struct OcpSolver::Linearization {
    std::vector<State4> f;            // stage propagations
    std::vector<Eigen::Matrix4d> a;   // d f / d x
    std::vector<Eigen::Vector4d> b;   // d f / d u
};

OcpSolution OcpSolver::solve(const State4& x0, std::optional<WarmStart> warm) {
    if (!x0.finite()) throw std::runtime_error("ocp: non-finite initial state");
    const int n_st = cfg_.n_stages;
    const int n = 7 * n_st + 4;
    const int me = 4 * (n_st + 1);

    OcpSolution cur;
    if (warm && warm->previous && warm->previous->x.size() == size_t(n_st) + 1) {
        cur = shifted_guess(*warm->previous, warm->elapsed, x0);
    } else {
        cur = initial_guess(x0);
    }
    cur.accepted_objectives.clear();

    auto pack = [&](const OcpSolution& s) {
        Eigen::VectorXd z(n);
        for (int k = 0; k < n_st; ++k) {
            z.segment<4>(ix(k)) = s.x[static_cast<size_t>(k)].vec();
            z[iu(k)] = s.u[static_cast<size_t>(k)];
            z[isl(k)] = s.slack[static_cast<size_t>(k)].first;
            z[isu(k)] = s.slack[static_cast<size_t>(k)].second;
        }
        z.segment<4>(7 * n_st) = s.x[static_cast<size_t>(n_st)].vec();
        return z;
    };
    auto unpack = [&](const Eigen::VectorXd& z, OcpSolution& s) {
        for (int k = 0; k < n_st; ++k) {
            s.x[static_cast<size_t>(k)] = State4::from_vec(z.segment<4>(ix(k)));
            s.u[static_cast<size_t>(k)] = z[iu(k)];
            s.slack[static_cast<size_t>(k)] = {z[isl(k)], z[isu(k)]};
        }
        s.x[static_cast<size_t>(n_st)] = State4::from_vec(z.segment<4>(7 * n_st));
    };

    Eigen::VectorXd z = pack(cur);

    // Shooting defect vector (x0 rows first, then one block per stage).
    auto defect_vec = [&](const Eigen::VectorXd& zz) {
        Eigen::VectorXd c(me);
        c.head<4>() = zz.head<4>() - x0.vec();
        for (int k = 0; k < n_st; ++k) {
            const State4 xk = State4::from_vec(zz.segment<4>(ix(k)));
            const State4 fk = integrate_step(xk, zz[iu(k)], dt_[static_cast<size_t>(k)], params_);
            const Eigen::Vector4d next = k + 1 < n_st ? zz.segment<4>(ix(k + 1)).eval()
                                                      : zz.segment<4>(7 * n_st).eval();
            c.segment<4>(4 * (k + 1)) = fk.vec() - next;
        }
        return c;
    };
    auto violation = [&](const Eigen::VectorXd& zz) {
        return defect_vec(zz).cwiseAbs().sum();
    };
    auto obj_of = [&](const Eigen::VectorXd& zz) {
        return 0.5 * zz.dot(hess_ * zz) + grad_.dot(zz);
    };

    Linearization lin;
    lin.f.resize(static_cast<size_t>(n_st));
    lin.a.resize(static_cast<size_t>(n_st));
    lin.b.resize(static_cast<size_t>(n_st));

    // S-l1-QP subproblem (Fletcher): the linearized shooting equalities are
    // made elastic, E z - p + q = e with p, q >= 0 entering the objective as
    // penalty * (p + q), and the step is confined to a trust-region box.
    // The QP objective then models the same l1 merit the line search uses,
    // and the subproblem is always feasible.
    const int mi_real = 6 * n_st;
    const int nv = n + 2 * me;  // z, p, q
    Eigen::VectorXd eq_dual = Eigen::VectorXd::Zero(me);
    Eigen::VectorXd ineq_dual = Eigen::VectorXd::Zero(mi_real);
    double penalty = 10.0;
    double radius = 2.0;
    if (const char* tr0 = std::getenv("NETSIM_OCP_TR0")) radius = std::atof(tr0);
    bool failed = false;
    const bool debug_trace = std::getenv("NETSIM_OCP_DEBUG") != nullptr;

    SparseQp qp;
    qp.eq_rhs.resize(me);
    qp.g.resize(nv);
    qp.g.head(n) = grad_;
    {
        std::vector<Eigen::Triplet<double>> ht;
        for (int k = 0; k < hess_.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator v(hess_, k); v; ++v)
                ht.emplace_back(int(v.row()), int(v.col()), v.value());
        qp.h.resize(nv, nv);
        qp.h.setFromTriplets(ht.begin(), ht.end());
    }
    {
        // Rows: transcription inequalities on z, trust-region box on z,
        // then p >= 0 and q >= 0.
        std::vector<Eigen::Triplet<double>> ct;
        for (int k = 0; k < ineq_.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator v(ineq_, k); v; ++v)
                ct.emplace_back(int(v.row()), int(v.col()), v.value());
        for (int i = 0; i < n; ++i) {
            ct.emplace_back(mi_real + 2 * i, i, 1.0);
            ct.emplace_back(mi_real + 2 * i + 1, i, -1.0);
        }
        for (int i = 0; i < 2 * me; ++i)
            ct.emplace_back(mi_real + 2 * n + i, n + i, -1.0);
        qp.ineq.resize(mi_real + 2 * n + 2 * me, nv);
        qp.ineq.setFromTriplets(ct.begin(), ct.end());
        qp.ineq_rhs.resize(mi_real + 2 * n + 2 * me);
        qp.ineq_rhs.head(mi_real) = ineq_rhs_;
        qp.ineq_rhs.tail(2 * me).setZero();
    }

    std::vector<Eigen::Triplet<double>> et;
    double kkt = std::numeric_limits<double>::infinity();
    int it = 0;

    for (; it < cfg_.sqp_max_iters; ++it) {
        // Propagate and linearize every stage at the current iterate.
        for (int k = 0; k < n_st; ++k) {
            const State4 xk = State4::from_vec(z.segment<4>(ix(k)));
            lin.f[static_cast<size_t>(k)] = integrate_step_jacobians(
                xk, z[iu(k)], dt_[static_cast<size_t>(k)], params_,
                lin.a[static_cast<size_t>(k)], lin.b[static_cast<size_t>(k)]);
        }

        // Equality system: x_0 = x0, x_{k+1} = F_k + A_k (x_k - xbar) + B_k (u_k - ubar),
        // each row relaxed by its elastic pair: E z - p + q = e.
        et.clear();
        for (int i = 0; i < 4; ++i) {
            et.emplace_back(i, i, 1.0);
            qp.eq_rhs[i] = x0.vec()[i];
        }
        for (int k = 0; k < n_st; ++k) {
            const int r0 = 4 * (k + 1);
            const int xnext = k + 1 < n_st ? ix(k + 1) : 7 * n_st;
            const Eigen::Matrix4d& a = lin.a[static_cast<size_t>(k)];
            const Eigen::Vector4d& b = lin.b[static_cast<size_t>(k)];
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) et.emplace_back(r0 + i, ix(k) + j, -a(i, j));
                et.emplace_back(r0 + i, iu(k), -b[i]);
                et.emplace_back(r0 + i, xnext + i, 1.0);
            }
            const Eigen::Vector4d rhs = lin.f[static_cast<size_t>(k)].vec() -
                                        a * z.segment<4>(ix(k)) - b * z[iu(k)];
            qp.eq_rhs.segment<4>(r0) = rhs;
        }
        for (int i = 0; i < me; ++i) {
            et.emplace_back(i, n + i, -1.0);
            et.emplace_back(i, n + me + i, 1.0);
        }
        qp.eq.resize(me, nv);
        qp.eq.setFromTriplets(et.begin(), et.end());

        // NLP KKT residual at the current iterate with the latest multipliers.
        double feas = 0.0;
        for (int i = 0; i < 4; ++i) feas = std::max(feas, std::abs(z[i] - x0.vec()[i]));
        for (int k = 0; k < n_st; ++k) {
            const int xnext = k + 1 < n_st ? ix(k + 1) : 7 * n_st;
            feas = std::max(feas, (lin.f[static_cast<size_t>(k)].vec() -
                                   z.segment<4>(xnext))
                                      .cwiseAbs()
                                      .maxCoeff());
        }
        const Eigen::SparseMatrix<double> eq_z = qp.eq.leftCols(n);
        const Eigen::VectorXd stat_v = hess_ * z + grad_ +
                                       eq_z.transpose() * eq_dual +
                                       ineq_.transpose() * ineq_dual;
        const double stat = stat_v.cwiseAbs().maxCoeff();
        const Eigen::VectorXd cslack = ineq_rhs_ - ineq_ * z;
        double comp = 0.0;
        for (Eigen::Index i = 0; i < cslack.size(); ++i)
            comp = std::max(comp, std::abs(cslack[i] * ineq_dual[i]));
        kkt = std::max({stat, feas, comp});
        if (debug_trace)
            std::fprintf(stderr,
                         "sqp it=%d stat=%.3e feas=%.3e comp=%.3e obj=%.6f radius=%.3g pen=%.1f\n",
                         it, stat, feas, comp, obj_of(z), radius, penalty);
        if (kkt <= cfg_.kkt_tol) break;

        // Near the solution steps are small; the trust region has done its
        // job and would only truncate Newton steps.
        if (feas <= 1e-6 && stat <= 1e-2) radius = std::max(radius, 1.0);

        for (int i = 0; i < n; ++i) {
            qp.ineq_rhs[mi_real + 2 * i] = z[i] + radius;
            qp.ineq_rhs[mi_real + 2 * i + 1] = -(z[i] - radius);
        }

        // Elastic penalty gradient for this iterate's QP.
        qp.g.tail(2 * me).setConstant(penalty);

        // Hint: current point with the elastics split to match the defects,
        // which is exactly feasible for the relaxed equalities.
        Eigen::VectorXd hint(nv);
        hint.head(n) = z;
        const Eigen::VectorXd lin_defect = eq_z * z - qp.eq_rhs;
        hint.segment(n, me) = lin_defect.cwiseMax(0.0);
        hint.tail(me) = (-lin_defect).cwiseMax(0.0);

        QpSolution qs = qp_.solve(qp, &hint);
        if (debug_trace)
            std::fprintf(stderr, "    qp ok=%d iters=%d res=%.3e comp=%.3e\n",
                         int(qs.ok), qs.iterations, qs.residual, qs.complementarity);
        if (!qs.z.allFinite()) {
            failed = true;
            break;
        }
        if (!qs.ok && qs.residual > 1e-6) {
            failed = true;
            break;
        }

        const Eigen::VectorXd d = qs.z.head(n) - z;
        const double step_norm = d.cwiseAbs().maxCoeff();
        const bool at_radius = step_norm >= 0.95 * radius;
        const double viol0 = violation(z);

        // If the QP leaves a large share of the defects unclosed although the
        // trust region is slack, the penalty undervalues feasibility.
        if (!at_radius && qs.z.tail(2 * me).sum() > 0.5 * viol0 && viol0 > 1e-8 &&
            penalty < 1e5) {
            penalty *= 10.0;
            continue;
        }
        const double phi0 = obj_of(z) + penalty * viol0;
        // Model reduction of the QP (same l1 merit, linearized constraints).
        const double model_phi = obj_of(qs.z.head(n)) + penalty * qs.z.tail(2 * me).sum();
        double descent = model_phi - phi0;
        if (descent > -1e-14) {
            if (step_norm <= 1e-11) break;  // no useful step left
            descent = -1e-14;
        }

        double alpha = 1.0;
        bool accepted = false;
        bool tried_soc = false;
        for (int ls = 0; ls < 30; ++ls) {
            const Eigen::VectorXd zt = z + alpha * d;
            const double phi = obj_of(zt) + penalty * violation(zt);
            if (phi <= phi0 + 1e-4 * alpha * descent) {
                z = zt;
                accepted = true;
                break;
            }
            if (!tried_soc && alpha == 1.0) {
                // Second-order correction against the Maratos effect: absorb
                // the trial point's defects through the current linearization
                // with a minimum-norm step, E d_soc = -c(z + d).
                tried_soc = true;
                const Eigen::VectorXd c_trial = defect_vec(zt);
                const Eigen::SparseMatrix<double> gram = (eq_z * eq_z.transpose()).pruned();
                Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> gram_ldlt(gram);
                if (gram_ldlt.info() == Eigen::Success) {
                    const Eigen::VectorXd d_soc = eq_z.transpose() * gram_ldlt.solve(-c_trial);
                    const Eigen::VectorXd zs = zt + d_soc;
                    const double phi_soc = obj_of(zs) + penalty * violation(zs);
                    if (phi_soc <= phi0 + 1e-4 * descent) {
                        z = zs;
                        accepted = true;
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        if (debug_trace)
            std::fprintf(stderr, "    step alpha=%.6f accepted=%d penalty=%.1f |d|=%.3e\n",
                         alpha, int(accepted), penalty, step_norm);
        if (!accepted) {
            radius = std::max(radius * 0.25, 1e-5);
            continue;
        }
        // Ratio-based trust region update on the accepted point.
        const double ared = phi0 - (obj_of(z) + penalty * violation(z));
        const double pred = -descent;
        const double rho = pred > 0.0 ? ared / pred : 1.0;
        if (rho >= 0.75 && at_radius)
            radius = std::min(radius * 2.0, 1e3);
        else if (rho < 0.25)
            radius = std::max(radius * 0.5, 1e-5);

        eq_dual = qs.eq_dual;
        ineq_dual = qs.ineq_dual.head(mi_real);
        cur.accepted_objectives.push_back(obj_of(z));
        if (!z.allFinite()) {
            failed = true;
            break;
        }
    }
    unpack(z, cur);
    // The box holds exactly by hard clamping (interior-point iterates can sit
    // within tolerance outside).
    for (auto& u : cur.u) u = std::clamp(u, cfg_.u_min, cfg_.u_max);
    for (auto& s : cur.slack) {
        s.first = std::max(0.0, s.first);
        s.second = std::max(0.0, s.second);
    }
    cur.objective = objective(cur.x, cur.u, cur.slack);
    cur.kkt_residual = kkt;
    cur.iterations = it;
    cur.converged = !failed && kkt <= cfg_.kkt_tol;
    return cur;
}

InputTrajectory extract_commanded(const OcpSolution& sol, const OcpConfig& cfg,
                                  double t_start, double t_com) {
    const double n_exact = t_com / cfg.fine_dt;
    const int n_samp = static_cast<int>(std::lround(n_exact));
    if (n_samp <= 0 || std::abs(double(n_samp) * cfg.fine_dt - t_com) > 1e-9)
        throw std::runtime_error("extract_commanded: T_com not aligned to the fine grid");
    if (n_samp > cfg.n_fine)
        throw std::runtime_error("extract_commanded: T_com exceeds the fine portion of the horizon");
    if (sol.u.size() < static_cast<size_t>(n_samp))
        throw std::runtime_error("extract_commanded: solution shorter than T_com");
    InputTrajectory traj;
    traj.start_time = t_start;
    traj.dt = cfg.fine_dt;
    traj.samples.assign(sol.u.begin(), sol.u.begin() + n_samp);
    return traj;
}

}  // namespace netsim
