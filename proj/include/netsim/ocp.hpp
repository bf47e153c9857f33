#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "netsim/pendulum.hpp"
#include "netsim/qp.hpp"
#include "netsim/schedule.hpp"

namespace netsim {

/// Horizon design: quadratic stage cost, Riccati terminal penalty, hard
/// input box, soft bounds on the arm angle. The default grid is 15 fine
/// stages of 20 ms followed by 35 coarse stages of 42.5 ms; the horizon is
/// the grid sum (1.7875 s) unless stretch_coarse_to is set, which rescales
/// the coarse steps so the grid sums to the requested horizon.
struct OcpConfig {
    int n_stages = 50;
    int n_fine = 15;
    double fine_dt = 0.02;
    double coarse_dt = 0.0425;
    double stretch_coarse_to = 0.0;  // 0: keep coarse_dt as given
    Eigen::Vector4d q_diag{1.6, 1.6, 0.1, 0.01};
    double r_input = 0.4;
    double beta = 1.0;
    double u_min = -7.5;
    double u_max = 7.5;
    double theta_min = -M_PI / 2.0;
    double theta_max = M_PI / 2.0;
    double slack_quad_weight = 0.1;
    double slack_lin_weight = 1.0;
    int sqp_max_iters = 100;
    double kkt_tol = 1e-8;

    std::vector<double> grid() const;   // the N step lengths
    double horizon() const;             // sum of the grid
};

struct SolveStats {
    int iterations = 0;
    double kkt_residual = 0.0;
    double objective = 0.0;
    double wall_ms = 0.0;
    bool converged = false;
};

struct OcpSolution {
    std::vector<State4> x;                         // N+1 states
    std::vector<double> u;                         // N inputs (ZOH per stage)
    std::vector<std::pair<double, double>> slack;  // (s_lb, s_ub) per stage
    double objective = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> accepted_objectives;  // objective after each accepted iterate
};

/// Direct multiple-shooting transcription of the horizon problem, solved by
/// SQP with the exact (quadratic) objective and Gauss-Newton structure: each
/// iterate linearizes the RK4 stage dynamics and solves a sparse convex QP.
/// Iterates are globalized by a backtracking line search on an L1 exact
/// penalty of the shooting defects. A solver instance is stateful only
/// through its reusable workspace; results depend solely on the arguments.
class OcpSolver {
public:
    struct WarmStart {
        const OcpSolution* previous = nullptr;
        double elapsed = 0.0;  // time shift between the two solve instants
    };

    OcpSolver(const OcpConfig& cfg, const PendulumParams& params);

    /// Terminal weight (solution of the Riccati equation at the upright
    /// equilibrium for the configured Q and R).
    const Eigen::Matrix4d& terminal_weight() const { return p_; }

    const OcpConfig& config() const { return cfg_; }

    /// Decision-variable counts of the transcription.
    int num_state_vars() const { return 4 * (cfg_.n_stages + 1); }
    int num_input_vars() const { return cfg_.n_stages; }
    int num_slack_vars() const { return 2 * cfg_.n_stages; }

    /// Objective of a candidate trajectory (stage costs + terminal penalty).
    double objective(const std::vector<State4>& x, const std::vector<double>& u,
                     const std::vector<std::pair<double, double>>& slack) const;

    OcpSolution solve(const State4& x0, std::optional<WarmStart> warm = std::nullopt);

private:
    struct Linearization;
    OcpSolution initial_guess(const State4& x0) const;
    OcpSolution shifted_guess(const OcpSolution& prev, double elapsed, const State4& x0) const;

    OcpConfig cfg_;
    PendulumParams params_;
    std::vector<double> dt_;
    Eigen::Matrix4d p_;
    QpSolver qp_;
    // constant pieces of the QP
    Eigen::SparseMatrix<double> hess_;
    Eigen::VectorXd grad_;
    Eigen::SparseMatrix<double> ineq_;
    Eigen::VectorXd ineq_rhs_;
};

/// First T_com worth of fine-grid ZOH samples of a solution, stamped to
/// begin at t_start. T_com must align with the fine grid.
InputTrajectory extract_commanded(const OcpSolution& sol, const OcpConfig& cfg,
                                  double t_start, double t_com);

}  // namespace netsim
