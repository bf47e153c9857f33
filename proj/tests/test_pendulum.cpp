#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "netsim/pendulum.hpp"

using namespace netsim;

namespace {

double deriv_norm(const StateDeriv4& d) {
    return std::sqrt(d.d_theta * d.d_theta + d.d_alpha * d.d_alpha +
                     d.d_theta_dot * d.d_theta_dot + d.d_alpha_dot * d.d_alpha_dot);
}

// Independent Cramer's-rule evaluation of the 2x2 mass-matrix solve.
void cramer_acc(const State4& x, double u, const PendulumParams& p, double& tdd, double& add) {
    const double a = p.m_p * p.L_r * p.L_r + p.J_r;
    const double b = 0.25 * p.m_p * p.L_p * p.L_p;
    const double c = 0.5 * p.m_p * p.L_p * p.L_r;
    const double d = p.J_p + 0.25 * p.m_p * p.L_p * p.L_p;
    const double e = 0.5 * p.m_p * p.L_p * p.g;
    const double s = std::sin(x.alpha), cc = std::cos(x.alpha);
    const double tau = p.k_t * (u - p.k_m * x.theta_dot) / p.R_m;
    const double m11 = a + b * s * s, m12 = -c * cc, m21 = -c * cc, m22 = d;
    const double r1 = tau - p.B_r * x.theta_dot - c * s * x.alpha_dot * x.alpha_dot -
                      2.0 * b * s * cc * x.alpha_dot * x.theta_dot;
    const double r2 = -p.B_p * x.alpha_dot + b * s * cc * x.theta_dot * x.theta_dot + e * s;
    const double det = m11 * m22 - m12 * m21;
    tdd = (r1 * m22 - m12 * r2) / det;
    add = (m11 * r2 - r1 * m21) / det;
}

}  // namespace

TEST_CASE("equilibria map to zero derivative") {
    PendulumParams p;
    SUBCASE("upright") {
        const StateDeriv4 d = dynamics({0, 0, 0, 0}, 0.0, p);
        CHECK(deriv_norm(d) <= 1e-12);
    }
    SUBCASE("hanging, theta arbitrary") {
        const StateDeriv4 d = dynamics({1.0, -M_PI, 0, 0}, 0.0, p);
        CHECK(deriv_norm(d) <= 1e-12);
    }
}

TEST_CASE("horizontal pendulum: gravity term only") {
    // Frozen oracle from an independent symbolic solve of the 2x2 system at
    // x = (0, -pi/2, 0, 0), u = 0: theta_dd = 0, alpha_dd = -843660/7397.
    PendulumParams p;
    const StateDeriv4 d = dynamics({0, -M_PI / 2.0, 0, 0}, 0.0, p);
    CHECK(d.d_theta == 0.0);
    CHECK(d.d_alpha == 0.0);
    CHECK(std::abs(d.d_theta_dot) <= 1e-12);  // cos(-pi/2) only vanishes to rounding
    CHECK(d.d_alpha_dot == doctest::Approx(-114.05434635663107).epsilon(1e-12));
}

TEST_CASE("mass-matrix solve equals Cramer's rule on random states") {
    PendulumParams p;
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        State4 x{4.0 * dist(gen), 4.0 * dist(gen), 12.0 * dist(gen), 12.0 * dist(gen)};
        const double u = 7.5 * dist(gen);
        const StateDeriv4 d = dynamics(x, u, p);
        double tdd, add;
        cramer_acc(x, u, p, tdd, add);
        CHECK(std::abs(d.d_theta_dot - tdd) <= 1e-12 * std::max(1.0, std::abs(tdd)));
        CHECK(std::abs(d.d_alpha_dot - add) <= 1e-12 * std::max(1.0, std::abs(add)));
    }
}

TEST_CASE("dynamics is deterministic") {
    PendulumParams p;
    const State4 x{0.3, -2.0, 1.5, -4.0};
    const StateDeriv4 a = dynamics(x, 3.3, p);
    const StateDeriv4 b = dynamics(x, 3.3, p);
    CHECK(a.d_theta_dot == b.d_theta_dot);
    CHECK(a.d_alpha_dot == b.d_alpha_dot);
}

TEST_CASE("integrate_step: zero dt returns x") {
    PendulumParams p;
    const State4 x{0.1, -1.0, 2.0, 3.0};
    const State4 y = integrate_step(x, 5.0, 0.0, p);
    CHECK(y.theta == x.theta);
    CHECK(y.alpha == x.alpha);
    CHECK(y.theta_dot == x.theta_dot);
    CHECK(y.alpha_dot == x.alpha_dot);
}

TEST_CASE("damped unforced swing dissipates energy at every step") {
    PendulumParams p;
    State4 x{0, -M_PI + 0.3, 0, 0};
    double e_prev = mechanical_energy(x, p);
    const double e_start = e_prev;
    for (int i = 0; i < 10000; ++i) {
        x = integrate_step(x, 0.0, 1e-3, p);
        const double e = mechanical_energy(x, p);
        CHECK(e <= e_prev + 1e-11);  // margin for integrator round-off
        e_prev = e;
    }
    CHECK(e_prev < e_start);

    // Fine-step oracle (dt = 0.01 ms) over the first 2 s, before the coupled
    // arm/pendulum motion amplifies integration differences.
    State4 xc{0, -M_PI + 0.3, 0, 0}, xf{0, -M_PI + 0.3, 0, 0};
    for (int i = 0; i < 2000; ++i) xc = integrate_step(xc, 0.0, 1e-3, p);
    for (int i = 0; i < 2000 * 100; ++i) xf = integrate_step(xf, 0.0, 1e-5, p);
    CHECK((xc.vec() - xf.vec()).cwiseAbs().maxCoeff() <= 1e-7);
    CHECK(std::abs(mechanical_energy(xc, p) - mechanical_energy(xf, p)) <= 1e-10);
}

TEST_CASE("RK4 converges at order 4 over a 20 ms interval") {
    // Errors vs a 64-substep reference shrink ~16x per step halving. The raw
    // one-step vs two-step gap at this state is ~1e-4 on the velocities
    // (h^5 * |x^(5)| with |x^(5)| ~ omega^5 * amplitude ~ 4e4).
    PendulumParams p;
    const State4 x0{0, -M_PI + 0.3, 0, 0};
    auto run = [&](int n) {
        State4 x = x0;
        for (int i = 0; i < n; ++i) x = integrate_step(x, 1.0, 0.02 / n, p);
        return x.vec();
    };
    const Eigen::Vector4d ref = run(64);
    const double e1 = (run(1) - ref).cwiseAbs().maxCoeff();
    const double e2 = (run(2) - ref).cwiseAbs().maxCoeff();
    const double e4 = (run(4) - ref).cwiseAbs().maxCoeff();
    CHECK(e1 <= 2e-3);
    CHECK(e1 / e2 >= 8.0);
    CHECK(e1 / e2 <= 40.0);
    CHECK(e2 / e4 >= 8.0);
    CHECK(e2 / e4 <= 40.0);
}

TEST_CASE("unforced perturbation of hanging equilibrium decays") {
    PendulumParams p;
    State4 x{0, -M_PI + 0.05, 0, 0.1};
    const double start = std::hypot(x.alpha + M_PI, x.alpha_dot);
    for (int i = 0; i < 60000; ++i) x = integrate_step(x, 0.0, 1e-3, p);
    CHECK(std::hypot(x.alpha + M_PI, x.alpha_dot) < start);
}

TEST_CASE("linearize matches central finite differences at upright") {
    PendulumParams p;
    Eigen::Matrix4d a;
    Eigen::Vector4d b;
    linearize(State4{}, 0.0, p, a, b);

    // kinematic rows are structural
    CHECK(a(0, 2) == 1.0);
    CHECK(a(1, 3) == 1.0);
    for (int j = 0; j < 2; ++j) {
        CHECK(a(0, j) == 0.0);
        CHECK(a(1, j) == 0.0);
    }
    CHECK(b[0] == 0.0);
    CHECK(b[1] == 0.0);
    CHECK(b[2] != 0.0);
    CHECK(b[3] != 0.0);

    const double h = 1e-6;
    auto fvec = [&](const Eigen::Vector4d& xv, double u) {
        const StateDeriv4 d = dynamics(State4::from_vec(xv), u, p);
        return Eigen::Vector4d{d.d_theta, d.d_alpha, d.d_theta_dot, d.d_alpha_dot};
    };
    for (int j = 0; j < 4; ++j) {
        Eigen::Vector4d e = Eigen::Vector4d::Zero();
        e[j] = h;
        const Eigen::Vector4d col = (fvec(e, 0.0) - fvec(-e, 0.0)) / (2.0 * h);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(a(i, j) - col[i]) <= 1e-5);
    }
    const Eigen::Vector4d bu = (fvec(Eigen::Vector4d::Zero(), h) -
                                fvec(Eigen::Vector4d::Zero(), -h)) /
                               (2.0 * h);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(b[i] - bu[i]) <= 1e-5);
}

TEST_CASE("analytic jacobians match finite differences away from equilibrium") {
    PendulumParams p;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double h = 1e-6;
    auto fvec = [&](const Eigen::Vector4d& xv, double u) {
        const StateDeriv4 d = dynamics(State4::from_vec(xv), u, p);
        return Eigen::Vector4d{d.d_theta, d.d_alpha, d.d_theta_dot, d.d_alpha_dot};
    };
    for (int t = 0; t < 50; ++t) {
        const Eigen::Vector4d xv{2.0 * dist(gen), 3.0 * dist(gen), 8.0 * dist(gen),
                                 8.0 * dist(gen)};
        const double u = 7.0 * dist(gen);
        Eigen::Matrix4d jx;
        Eigen::Vector4d ju;
        dynamics_jacobians(State4::from_vec(xv), u, p, jx, ju);
        for (int j = 0; j < 4; ++j) {
            Eigen::Vector4d e = Eigen::Vector4d::Zero();
            e[j] = h;
            const Eigen::Vector4d col = (fvec(xv + e, u) - fvec(xv - e, u)) / (2.0 * h);
            for (int i = 0; i < 4; ++i)
                CHECK(std::abs(jx(i, j) - col[i]) <=
                      1e-4 * std::max(1.0, std::abs(col[i])));
        }
        const Eigen::Vector4d bu = (fvec(xv, u + h) - fvec(xv, u - h)) / (2.0 * h);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(ju[i] - bu[i]) <= 1e-5);
    }
}

TEST_CASE("linearize rejects non-equilibrium points") {
    PendulumParams p;
    Eigen::Matrix4d a;
    Eigen::Vector4d b;
    CHECK_THROWS(linearize({0, -1.0, 0, 0}, 0.0, p, a, b));
}

TEST_CASE("rk4 step jacobians match finite differences") {
    PendulumParams p;
    const Eigen::Vector4d xv{0.2, -2.5, 3.0, -4.0};
    const double u = 2.0, dt = 0.02, h = 1e-6;
    Eigen::Matrix4d a;
    Eigen::Vector4d b;
    integrate_step_jacobians(State4::from_vec(xv), u, dt, p, a, b);
    for (int j = 0; j < 4; ++j) {
        Eigen::Vector4d e = Eigen::Vector4d::Zero();
        e[j] = h;
        const Eigen::Vector4d col =
            (integrate_step(State4::from_vec(xv + e), u, dt, p).vec() -
             integrate_step(State4::from_vec(xv - e), u, dt, p).vec()) /
            (2.0 * h);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(a(i, j) - col[i]) <= 1e-6);
    }
    const Eigen::Vector4d bu = (integrate_step(State4::from_vec(xv), u + h, dt, p).vec() -
                                integrate_step(State4::from_vec(xv), u - h, dt, p).vec()) /
                               (2.0 * h);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(b[i] - bu[i]) <= 1e-6);
}
