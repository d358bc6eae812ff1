#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "delfi/dual.hpp"
#include "delfi/parallel.hpp"
#include "delfi/reference.hpp"
#include "helpers.hpp"

using namespace delfi;
using namespace delfi::testing;

namespace {

const Eigen::VectorXd kMu2 = vec({2.0});
const Eigen::VectorXd kLam01 = vec({0.1});

}  // namespace

TEST_CASE("dual value is zero at lambda = 0") {
    Partition p = random_partition(37, 3, 11);
    CHECK(dual_value(p, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)) == 0.0);
}

TEST_CASE("scalar oracle: rows {1,3}, mu=2, lambda=0.1") {
    Partition p = scalar_partition({1.0, 3.0});
    // -(log 0.9 + log 1.1)/2, frozen from a 40-digit oracle
    CHECK(dual_value(p, kMu2, kLam01) == doctest::Approx(0.0050251679267507206).epsilon(1e-14));
    CHECK(dual_gradient(p, kMu2, kLam01)(0) ==
          doctest::Approx(0.10101010101010101).epsilon(1e-14));
    CHECK(dual_hessian(p, kMu2, kLam01)(0, 0) ==
          doctest::Approx(1.0305070911131517).epsilon(1e-14));
    CHECK(elr_contribution(p, kMu2, kLam01) ==
          doctest::Approx(-0.020100671707002882).epsilon(1e-14));
}

TEST_CASE("infeasible multiplier is reported") {
    Partition p = scalar_partition({1.0, 3.0}, 7);
    // 1 + (-1.2)(1 - 2) ... the offending row is x = 3: 1 + (-1.2)(1) < 0
    try {
        dual_value(p, kMu2, vec({-1.2}));
        FAIL("expected InfeasibleMultiplier");
    } catch (const InfeasibleMultiplier& e) {
        CHECK(e.machine_id == 7);
    }
    CHECK_THROWS_AS(dual_gradient(p, kMu2, vec({-1.2})), InfeasibleMultiplier);
    CHECK_THROWS_AS(dual_hessian(p, kMu2, vec({-1.2})), InfeasibleMultiplier);
    CHECK_THROWS_AS(elr_contribution(p, kMu2, vec({-1.2})), InfeasibleMultiplier);
}

TEST_CASE("lambda = 0 reduces to moments") {
    Partition p = random_partition(101, 4, 5);
    Eigen::VectorXd mu = vec({0.1, -0.2, 0.0, 0.3});
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);

    Eigen::VectorXd grad = dual_gradient(p, mu, zero);
    CHECK((grad + (p.mean() - mu)).norm() == doctest::Approx(0.0).epsilon(1e-13));

    Eigen::MatrixXd hess = dual_hessian(p, mu, zero);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(4, 4);
    for (Eigen::Index j = 0; j < p.n(); ++j) {
        Eigen::VectorXd z = p.rows.row(j).transpose() - mu;
        second += z * z.transpose() / static_cast<double>(p.n());
    }
    CHECK((hess - second).norm() / second.norm() < 1e-12);
}

TEST_CASE("gradient matches central differences") {
    Partition p = random_partition(60, 3, 21);
    Eigen::VectorXd mu = vec({0.2, -0.1, 0.05});
    for (unsigned s = 0; s < 20; ++s) {
        Eigen::VectorXd lam = random_feasible_lambda(p, mu, 100 + s);
        Eigen::VectorXd grad = dual_gradient(p, mu, lam);
        const double h = 1e-6;
        Eigen::VectorXd fd(3);
        for (Eigen::Index a = 0; a < 3; ++a) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
            e(a) = h;
            fd(a) = (dual_value(p, mu, lam + e) - dual_value(p, mu, lam - e)) / (2 * h);
        }
        CHECK((fd - grad).norm() / std::max(grad.norm(), 1e-12) < 1e-6);
    }
}

TEST_CASE("hessian matches central differences of the gradient") {
    Partition p = random_partition(40, 3, 33);
    Eigen::VectorXd mu = vec({0.0, 0.1, -0.2});
    for (unsigned s = 0; s < 10; ++s) {
        Eigen::VectorXd lam = random_feasible_lambda(p, mu, 900 + s);
        Eigen::MatrixXd hess = dual_hessian(p, mu, lam);
        const double h = 1e-5;
        Eigen::MatrixXd fd(3, 3);
        for (Eigen::Index a = 0; a < 3; ++a) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
            e(a) = h;
            fd.col(a) = (dual_gradient(p, mu, lam + e) - dual_gradient(p, mu, lam - e)) / (2 * h);
        }
        CHECK((fd - hess).norm() / hess.norm() < 1e-5);
    }
}

TEST_CASE("hessian is symmetric PSD at feasible points") {
    Partition p = random_partition(80, 5, 44);
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(5);
    for (unsigned s = 0; s < 10; ++s) {
        Eigen::VectorXd lam = random_feasible_lambda(p, mu, 50 + s);
        Eigen::MatrixXd hess = dual_hessian(p, mu, lam);
        CHECK((hess - hess.transpose()).norm() <= 1e-12 * hess.norm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("dual value is convex along feasible segments") {
    Partition p = random_partition(50, 2, 66);
    Eigen::VectorXd mu = vec({0.1, 0.1});
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    for (unsigned s = 0; s < 30; ++s) {
        Eigen::VectorXd a = random_feasible_lambda(p, mu, 200 + s);
        Eigen::VectorXd b = random_feasible_lambda(p, mu, 500 + s);
        const double t = unif(eng);
        const double lhs = dual_value(p, mu, t * a + (1 - t) * b);
        const double rhs = t * dual_value(p, mu, a) + (1 - t) * dual_value(p, mu, b);
        CHECK(lhs <= rhs + 1e-12);
    }
}

TEST_CASE("statistic contribution identity") {
    Partition p = random_partition(64, 3, 77);
    Eigen::VectorXd mu = vec({0.0, 0.2, -0.1});
    CHECK(elr_contribution(p, mu, Eigen::VectorXd::Zero(3)) == 0.0);
    for (unsigned s = 0; s < 50; ++s) {
        Eigen::VectorXd lam = random_feasible_lambda(p, mu, 300 + s);
        const double direct = elr_contribution(p, mu, lam);
        const double via_value = -2.0 * static_cast<double>(p.n()) * dual_value(p, mu, lam);
        CHECK(direct == doctest::Approx(via_value).epsilon(1e-12));
    }
}

TEST_CASE("translation equivariance") {
    Partition p = random_partition(45, 3, 88);
    Eigen::VectorXd mu = vec({0.1, -0.3, 0.2});
    Eigen::VectorXd shift = vec({5.0, -2.0, 11.0});
    Partition q = p;
    q.rows.rowwise() += shift.transpose();
    for (unsigned s = 0; s < 10; ++s) {
        Eigen::VectorXd lam = random_feasible_lambda(p, mu, 600 + s);
        const double v0 = dual_value(p, mu, lam);
        const double v1 = dual_value(q, mu + shift, lam);
        CHECK(v1 == doctest::Approx(v0).epsilon(1e-12));
        CHECK((dual_gradient(q, mu + shift, lam) - dual_gradient(p, mu, lam)).norm() <=
              1e-12 * std::max(1.0, dual_gradient(p, mu, lam).norm()));
    }
}

TEST_CASE("blocked kernels agree with the serial reference") {
    Partition p = random_partition(3000, 4, 99);  // spans several blocks
    Eigen::VectorXd mu = vec({0.05, 0.0, -0.05, 0.1});
    Eigen::VectorXd lam = random_feasible_lambda(p, mu, 1);
    CHECK(dual_value(p, mu, lam) ==
          doctest::Approx(reference::dual_value(p, mu, lam)).epsilon(1e-13));
    CHECK((dual_gradient(p, mu, lam) - reference::dual_gradient(p, mu, lam)).norm() <=
          1e-13 * std::max(1.0, reference::dual_gradient(p, mu, lam).norm()));
    CHECK((dual_hessian(p, mu, lam) - reference::dual_hessian(p, mu, lam)).norm() <=
          1e-13 * reference::dual_hessian(p, mu, lam).norm());
}

TEST_CASE("kernel results are bit-identical across thread counts") {
    Partition p = random_partition(5000, 5, 123);
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(5);
    Eigen::VectorXd lam = random_feasible_lambda(p, mu, 2);

    set_engine_threads(1);
    DualEval one = dual_eval(p, mu, lam, true);
    set_engine_threads(4);
    DualEval four = dual_eval(p, mu, lam, true);
    set_engine_threads(0);

    CHECK(one.value == four.value);
    CHECK(one.gradient == four.gradient);
    CHECK(*one.hessian == *four.hessian);
}

TEST_CASE("margin scan reports the worst row") {
    Partition p = scalar_partition({1.0, 3.0});
    MarginScan scan = margin_and_value(p, kMu2, vec({-1.2}));
    CHECK(scan.min_margin == doctest::Approx(-0.2));
    CHECK(std::isnan(scan.value));
    MarginScan ok = margin_and_value(p, kMu2, kLam01);
    CHECK(ok.min_margin == doctest::Approx(0.9));
    CHECK(ok.value == doctest::Approx(0.0050251679267507206));
}

TEST_CASE("dimension mismatches are rejected") {
    Partition p = random_partition(10, 3, 4);
    CHECK_THROWS_AS(dual_value(p, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)),
                    InvalidConfig);
    CHECK_THROWS_AS(dual_value(p, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(4)),
                    InvalidConfig);
}
