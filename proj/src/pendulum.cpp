#include "netsim/pendulum.hpp"

#include <cmath>
#include <stdexcept>

namespace netsim {

bool State4::finite() const {
    return std::isfinite(theta) && std::isfinite(alpha) &&
           std::isfinite(theta_dot) && std::isfinite(alpha_dot);
}

bool PendulumParams::valid() const {
    for (double v : {R_m, k_t, k_m, m_r, L_r, J_r, m_p, L_p, J_p, B_r, B_p, g}) {
        if (!(v > 0.0) || !std::isfinite(v)) return false;
    }
    return true;
}

namespace {

// Coefficients of the 2x2 system M(alpha) * [theta_dd; alpha_dd] = r:
//   m11 = a + b*sin^2(alpha)   m12 = -c*cos(alpha)
//   m21 = -c*cos(alpha)        m22 = d
struct Coeffs {
    double a, b, c, d, e;
    explicit Coeffs(const PendulumParams& p)
        : a(p.m_p * p.L_r * p.L_r + p.J_r),
          b(0.25 * p.m_p * p.L_p * p.L_p),
          c(0.5 * p.m_p * p.L_p * p.L_r),
          d(p.J_p + 0.25 * p.m_p * p.L_p * p.L_p),
          e(0.5 * p.m_p * p.L_p * p.g) {}
};

}  // namespace

StateDeriv4 dynamics(const State4& x, double u, const PendulumParams& p) {
    if (!std::isfinite(u)) throw std::runtime_error("dynamics: non-finite input");
    const Coeffs k(p);
    const double s = std::sin(x.alpha);
    const double cc = std::cos(x.alpha);
    const double td = x.theta_dot;
    const double ad = x.alpha_dot;

    const double tau = p.k_t * (u - p.k_m * td) / p.R_m;

    const double m11 = k.a + k.b * s * s;
    const double m12 = -k.c * cc;
    const double m22 = k.d;

    const double r1 = tau - p.B_r * td - k.c * s * ad * ad - 2.0 * k.b * s * cc * ad * td;
    const double r2 = -p.B_p * ad + k.b * s * cc * td * td + k.e * s;

    const double det = m11 * m22 - m12 * m12;
    if (std::abs(det) < 1e-12) throw std::runtime_error("dynamics: singular mass matrix");

    StateDeriv4 dx;
    dx.d_theta = td;
    dx.d_alpha = ad;
    dx.d_theta_dot = (m22 * r1 - m12 * r2) / det;
    dx.d_alpha_dot = (m11 * r2 - m12 * r1) / det;
    return dx;
}

namespace {

inline State4 axpy(const State4& x, double h, const StateDeriv4& k) {
    return {x.theta + h * k.d_theta, x.alpha + h * k.d_alpha,
            x.theta_dot + h * k.d_theta_dot, x.alpha_dot + h * k.d_alpha_dot};
}

}  // namespace

State4 integrate_step(const State4& x, double u_hold, double dt, const PendulumParams& p) {
    if (dt < 0.0) throw std::runtime_error("integrate_step: negative dt");
    if (dt == 0.0) return x;
    const StateDeriv4 k1 = dynamics(x, u_hold, p);
    const StateDeriv4 k2 = dynamics(axpy(x, 0.5 * dt, k1), u_hold, p);
    const StateDeriv4 k3 = dynamics(axpy(x, 0.5 * dt, k2), u_hold, p);
    const StateDeriv4 k4 = dynamics(axpy(x, dt, k3), u_hold, p);
    State4 out;
    const double h6 = dt / 6.0;
    out.theta = x.theta + h6 * (k1.d_theta + 2.0 * k2.d_theta + 2.0 * k3.d_theta + k4.d_theta);
    out.alpha = x.alpha + h6 * (k1.d_alpha + 2.0 * k2.d_alpha + 2.0 * k3.d_alpha + k4.d_alpha);
    out.theta_dot = x.theta_dot +
                    h6 * (k1.d_theta_dot + 2.0 * k2.d_theta_dot + 2.0 * k3.d_theta_dot + k4.d_theta_dot);
    out.alpha_dot = x.alpha_dot +
                    h6 * (k1.d_alpha_dot + 2.0 * k2.d_alpha_dot + 2.0 * k3.d_alpha_dot + k4.d_alpha_dot);
    if (!out.finite()) throw std::runtime_error("integrate_step: non-finite state");
    return out;
}

void dynamics_jacobians(const State4& x, double u, const PendulumParams& p,
                        Eigen::Matrix4d& jx, Eigen::Vector4d& ju) {
    const Coeffs k(p);
    const double s = std::sin(x.alpha);
    const double cc = std::cos(x.alpha);
    const double td = x.theta_dot;
    const double ad = x.alpha_dot;

    const double tau = p.k_t * (u - p.k_m * td) / p.R_m;
    const double m11 = k.a + k.b * s * s;
    const double m12 = -k.c * cc;
    const double m22 = k.d;
    const double det = m11 * m22 - m12 * m12;
    if (std::abs(det) < 1e-12) throw std::runtime_error("dynamics_jacobians: singular mass matrix");

    const double r1 = tau - p.B_r * td - k.c * s * ad * ad - 2.0 * k.b * s * cc * ad * td;
    const double r2 = -p.B_p * ad + k.b * s * cc * td * td + k.e * s;

    const double acc_t = (m22 * r1 - m12 * r2) / det;
    const double acc_a = (m11 * r2 - m12 * r1) / det;

    // d(acc)/dq = M^{-1} (dr/dq - dM/dq * acc), q in {alpha, theta_dot, alpha_dot, u}.
    const double c2 = cc * cc - s * s;  // cos(2a)
    // dM/dalpha entries
    const double dm11 = 2.0 * k.b * s * cc;
    const double dm12 = k.c * s;

    const double dr1_da = -k.c * cc * ad * ad - 2.0 * k.b * c2 * ad * td;
    const double dr2_da = k.b * c2 * td * td + k.e * cc;
    const double dr1_dtd = -p.k_t * p.k_m / p.R_m - p.B_r - 2.0 * k.b * s * cc * ad;
    const double dr2_dtd = 2.0 * k.b * s * cc * td;
    const double dr1_dad = -2.0 * k.c * s * ad - 2.0 * k.b * s * cc * td;
    const double dr2_dad = -p.B_p;
    const double dr1_du = p.k_t / p.R_m;

    auto solve2 = [&](double b1, double b2, double& y1, double& y2) {
        y1 = (m22 * b1 - m12 * b2) / det;
        y2 = (m11 * b2 - m12 * b1) / det;
    };

    // alpha column: rhs includes -dM/dalpha * acc
    double ga1 = dr1_da - (dm11 * acc_t + dm12 * acc_a);
    double ga2 = dr2_da - (dm12 * acc_t /* dm22 = 0 */);
    double jt_a, ja_a;
    solve2(ga1, ga2, jt_a, ja_a);

    double jt_td, ja_td, jt_ad, ja_ad, jt_u, ja_u;
    solve2(dr1_dtd, dr2_dtd, jt_td, ja_td);
    solve2(dr1_dad, dr2_dad, jt_ad, ja_ad);
    solve2(dr1_du, 0.0, jt_u, ja_u);

    jx.setZero();
    jx(0, 2) = 1.0;
    jx(1, 3) = 1.0;
    jx(2, 1) = jt_a;
    jx(2, 2) = jt_td;
    jx(2, 3) = jt_ad;
    jx(3, 1) = ja_a;
    jx(3, 2) = ja_td;
    jx(3, 3) = ja_ad;
    ju << 0.0, 0.0, jt_u, ja_u;
}

State4 integrate_step_jacobians(const State4& x, double u_hold, double dt,
                                const PendulumParams& p,
                                Eigen::Matrix4d& a, Eigen::Vector4d& b) {
    if (dt == 0.0) {
        a.setIdentity();
        b.setZero();
        return x;
    }
    Eigen::Matrix4d j1, j2, j3, j4;
    Eigen::Vector4d g1, g2, g3, g4;

    const StateDeriv4 k1 = dynamics(x, u_hold, p);
    dynamics_jacobians(x, u_hold, p, j1, g1);

    const State4 x2 = axpy(x, 0.5 * dt, k1);
    const StateDeriv4 k2 = dynamics(x2, u_hold, p);
    dynamics_jacobians(x2, u_hold, p, j2, g2);

    const State4 x3 = axpy(x, 0.5 * dt, k2);
    const StateDeriv4 k3 = dynamics(x3, u_hold, p);
    dynamics_jacobians(x3, u_hold, p, j3, g3);

    const State4 x4 = axpy(x, dt, k3);
    const StateDeriv4 k4 = dynamics(x4, u_hold, p);
    dynamics_jacobians(x4, u_hold, p, j4, g4);

    const Eigen::Matrix4d id = Eigen::Matrix4d::Identity();
    // Stage sensitivities: dki/dx and dki/du.
    const Eigen::Matrix4d K1x = j1;
    const Eigen::Vector4d K1u = g1;
    const Eigen::Matrix4d K2x = j2 * (id + 0.5 * dt * K1x);
    const Eigen::Vector4d K2u = g2 + j2 * (0.5 * dt * K1u);
    const Eigen::Matrix4d K3x = j3 * (id + 0.5 * dt * K2x);
    const Eigen::Vector4d K3u = g3 + j3 * (0.5 * dt * K2u);
    const Eigen::Matrix4d K4x = j4 * (id + dt * K3x);
    const Eigen::Vector4d K4u = g4 + j4 * (dt * K3u);

    a = id + (dt / 6.0) * (K1x + 2.0 * K2x + 2.0 * K3x + K4x);
    b = (dt / 6.0) * (K1u + 2.0 * K2u + 2.0 * K3u + K4u);

    State4 out;
    const double h6 = dt / 6.0;
    out.theta = x.theta + h6 * (k1.d_theta + 2.0 * k2.d_theta + 2.0 * k3.d_theta + k4.d_theta);
    out.alpha = x.alpha + h6 * (k1.d_alpha + 2.0 * k2.d_alpha + 2.0 * k3.d_alpha + k4.d_alpha);
    out.theta_dot = x.theta_dot +
                    h6 * (k1.d_theta_dot + 2.0 * k2.d_theta_dot + 2.0 * k3.d_theta_dot + k4.d_theta_dot);
    out.alpha_dot = x.alpha_dot +
                    h6 * (k1.d_alpha_dot + 2.0 * k2.d_alpha_dot + 2.0 * k3.d_alpha_dot + k4.d_alpha_dot);
    if (!out.finite()) throw std::runtime_error("integrate_step_jacobians: non-finite state");
    return out;
}

void linearize(const State4& x_eq, double u_eq, const PendulumParams& p,
               Eigen::Matrix4d& a, Eigen::Vector4d& b) {
    const StateDeriv4 d = dynamics(x_eq, u_eq, p);
    const double n = std::sqrt(d.d_theta * d.d_theta + d.d_alpha * d.d_alpha +
                               d.d_theta_dot * d.d_theta_dot + d.d_alpha_dot * d.d_alpha_dot);
    if (n > 1e-9) throw std::runtime_error("linearize: point is not an equilibrium");
    dynamics_jacobians(x_eq, u_eq, p, a, b);
}

double mechanical_energy(const State4& x, const PendulumParams& p) {
    const Coeffs k(p);
    const double s = std::sin(x.alpha);
    const double cc = std::cos(x.alpha);
    const double kin = 0.5 * (k.a + k.b * s * s) * x.theta_dot * x.theta_dot -
                       k.c * cc * x.theta_dot * x.alpha_dot +
                       0.5 * k.d * x.alpha_dot * x.alpha_dot;
    return kin + k.e * cc;
}

}  // namespace netsim
