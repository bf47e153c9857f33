#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "netsim/qp.hpp"

using namespace netsim;

namespace {

SparseQp dense_to_qp(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                     const Eigen::MatrixXd& e, const Eigen::VectorXd& erhs,
                     const Eigen::MatrixXd& c, const Eigen::VectorXd& crhs) {
    SparseQp qp;
    qp.h = h.sparseView();
    qp.g = g;
    qp.eq = e.sparseView();
    qp.eq_rhs = erhs;
    qp.ineq = c.sparseView();
    qp.ineq_rhs = crhs;
    return qp;
}

}  // namespace

TEST_CASE("box-constrained quadratic with active bound") {
    // min 1/2 (z0^2 + z1^2) - 2 z0  s.t. z0 <= 1, solution z = (1, 0).
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd g(2);
    g << -2.0, 0.0;
    Eigen::MatrixXd c(1, 2);
    c << 1.0, 0.0;
    Eigen::VectorXd crhs(1);
    crhs << 1.0;
    auto qp = dense_to_qp(h, g, Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), c, crhs);

    QpSolver solver;
    const QpSolution s = solver.solve(qp);
    REQUIRE(s.ok);
    CHECK(std::abs(s.z[0] - 1.0) <= 1e-8);
    CHECK(std::abs(s.z[1]) <= 1e-8);
    CHECK(s.ineq_dual[0] >= 0.0);
    CHECK(std::abs(s.ineq_dual[0] - 1.0) <= 1e-7);  // gradient balance at the bound
}

TEST_CASE("equality constrained quadratic") {
    // min 1/2 ||z||^2 s.t. z0 + z1 = 2 -> z = (1, 1).
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd e(1, 2);
    e << 1.0, 1.0;
    Eigen::VectorXd erhs(1);
    erhs << 2.0;
    Eigen::MatrixXd c(1, 2);
    c << 0.0, 1.0;
    Eigen::VectorXd crhs(1);
    crhs << 10.0;  // inactive
    auto qp = dense_to_qp(h, g, e, erhs, c, crhs);

    QpSolver solver;
    const QpSolution s = solver.solve(qp);
    REQUIRE(s.ok);
    CHECK(std::abs(s.z[0] - 1.0) <= 1e-8);
    CHECK(std::abs(s.z[1] - 1.0) <= 1e-8);
}

TEST_CASE("random strictly convex problems satisfy the KKT conditions") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    QpSolver solver;
    for (int t = 0; t < 25; ++t) {
        const int n = 8, me = 3, mi = 6;
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = dist(gen);
        Eigen::MatrixXd h = m.transpose() * m + 0.1 * Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd g(n);
        for (int i = 0; i < n; ++i) g[i] = dist(gen);
        Eigen::MatrixXd e(me, n);
        for (int i = 0; i < me; ++i)
            for (int j = 0; j < n; ++j) e(i, j) = dist(gen);
        Eigen::VectorXd erhs(me);
        for (int i = 0; i < me; ++i) erhs[i] = 0.3 * dist(gen);
        Eigen::MatrixXd c(mi, n);
        for (int i = 0; i < mi; ++i)
            for (int j = 0; j < n; ++j) c(i, j) = dist(gen);
        Eigen::VectorXd crhs(mi);
        for (int i = 0; i < mi; ++i) crhs[i] = 0.5 + std::abs(dist(gen));

        auto qp = dense_to_qp(h, g, e, erhs, c, crhs);
        const QpSolution s = solver.solve(qp);
        REQUIRE(s.ok);

        const Eigen::VectorXd stat =
            h * s.z + g + e.transpose() * s.eq_dual + c.transpose() * s.ineq_dual;
        CHECK(stat.cwiseAbs().maxCoeff() <= 1e-7);
        CHECK((e * s.z - erhs).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(((c * s.z - crhs).array() <= 1e-8).all());
        CHECK((s.ineq_dual.array() >= -1e-12).all());
        for (int i = 0; i < mi; ++i)
            CHECK(std::abs(s.ineq_dual[i] * (crhs[i] - (c * s.z)[i])) <= 1e-6);
    }
}

TEST_CASE("determinism: identical problems give bit-identical solutions") {
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd g(3);
    g << 1.0, -2.0, 0.5;
    Eigen::MatrixXd c(2, 3);
    c << 1, 1, 0, 0, -1, 1;
    Eigen::VectorXd crhs(2);
    crhs << 1.0, 0.5;
    auto qp = dense_to_qp(h, g, Eigen::MatrixXd(0, 3), Eigen::VectorXd(0), c, crhs);
    QpSolver s1, s2;
    const auto a = s1.solve(qp);
    const auto b = s2.solve(qp);
    REQUIRE(a.ok);
    REQUIRE(b.ok);
    CHECK((a.z - b.z).cwiseAbs().maxCoeff() == 0.0);
}
