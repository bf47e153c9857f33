#pragma once

#include <Eigen/Dense>

namespace netsim {

// State of the rotary pendulum: x = (theta, alpha, theta_dot, alpha_dot).
// alpha = 0 is upright, alpha = -pi hangs straight down. Angles are kept
// unwrapped (no modular reduction) so differences between nearby states
// stay continuous across revolutions.
struct State4 {
    double theta = 0.0;      // rotary arm angle (rad)
    double alpha = 0.0;      // pendulum angle (rad)
    double theta_dot = 0.0;  // rad/s
    double alpha_dot = 0.0;  // rad/s

    bool finite() const;
    Eigen::Vector4d vec() const { return {theta, alpha, theta_dot, alpha_dot}; }
    static State4 from_vec(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

    friend State4 operator-(const State4& a, const State4& b) {
        return {a.theta - b.theta, a.alpha - b.alpha,
                a.theta_dot - b.theta_dot, a.alpha_dot - b.alpha_dot};
    }
    double norm2() const {
        return std::sqrt(theta * theta + alpha * alpha +
                         theta_dot * theta_dot + alpha_dot * alpha_dot);
    }
};

struct StateDeriv4 {
    double d_theta = 0.0;
    double d_alpha = 0.0;
    double d_theta_dot = 0.0;   // rad/s^2
    double d_alpha_dot = 0.0;   // rad/s^2
};

// Physical parameters of the rotary pendulum (defaults: Quanser Servo 2).
// m_r is carried for completeness but unused: the rotary arm enters the
// equations of motion only through its inertia J_r.
struct PendulumParams {
    double R_m = 8.4;       // motor resistance (Ohm)
    double k_t = 0.042;     // current-torque constant (N*m/A)
    double k_m = 0.042;     // back-EMF constant (V*s/rad)
    double m_r = 0.095;     // rotary arm mass (kg), inert
    double L_r = 0.085;     // rotary arm length (m)
    double J_r = 5.72e-5;   // rotary arm inertia (kg*m^2)
    double m_p = 0.024;     // pendulum mass (kg)
    double L_p = 0.129;     // pendulum length (m)
    double J_p = 3.33e-5;   // pendulum inertia (kg*m^2)
    double B_r = 2.7e-4;    // viscous damping, rotary arm (N*m*s/rad)
    double B_p = 5e-5;      // viscous damping, pendulum (N*m*s/rad)
    double g = 9.81;        // gravity (m/s^2)

    bool valid() const;
};

/// Continuous-time equations of motion. The coupled 2x2 linear system in
/// (theta_dd, alpha_dd) is assembled and solved exactly per call.
/// Throws std::runtime_error if the mass matrix is numerically singular
/// (|det| < 1e-12); this does not happen for physical parameter sets.
StateDeriv4 dynamics(const State4& x, double u, const PendulumParams& p);

/// One classical RK4 step under zero-order-hold input. dt = 0 returns x.
/// Throws if the result is non-finite (diverged trajectory or bad dt).
State4 integrate_step(const State4& x, double u_hold, double dt, const PendulumParams& p);

/// Analytic Jacobians of dynamics(): jx = d(xdot)/dx (4x4), ju = d(xdot)/du.
void dynamics_jacobians(const State4& x, double u, const PendulumParams& p,
                        Eigen::Matrix4d& jx, Eigen::Vector4d& ju);

/// Jacobians of one RK4 step (chain rule through the four stages).
/// Also returns the propagated state.
State4 integrate_step_jacobians(const State4& x, double u_hold, double dt,
                                const PendulumParams& p,
                                Eigen::Matrix4d& a, Eigen::Vector4d& b);

/// Exact Jacobians of dynamics() at an equilibrium point.
/// Throws if (x_eq, u_eq) is not an equilibrium (||dynamics|| > 1e-9).
void linearize(const State4& x_eq, double u_eq, const PendulumParams& p,
               Eigen::Matrix4d& a, Eigen::Vector4d& b);

/// Kinetic + potential energy; decreases along unforced damped motion.
double mechanical_energy(const State4& x, const PendulumParams& p);

}  // namespace netsim
