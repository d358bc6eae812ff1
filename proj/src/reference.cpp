#include "delfi/reference.hpp"

#include <cmath>
#include <string>

namespace delfi::reference {

namespace {

double margin_or_throw(const Partition& part, const Eigen::VectorXd& mu,
                       const Eigen::VectorXd& lam, Eigen::Index j) {
    const double u = lam.dot(part.rows.row(j).transpose() - mu);
    if (1.0 + u <= 0.0)
        throw InfeasibleMultiplier("infeasible at row " + std::to_string(j),
                                   part.machine_id);
    return u;
}

}  // namespace

double dual_value(const Partition& part, const Eigen::VectorXd& mu,
                  const Eigen::VectorXd& lam) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < part.n(); ++j)
        sum += std::log1p(margin_or_throw(part, mu, lam, j));
    return -sum / static_cast<double>(part.n());
}

Eigen::VectorXd dual_gradient(const Partition& part, const Eigen::VectorXd& mu,
                              const Eigen::VectorXd& lam) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(part.dim());
    for (Eigen::Index j = 0; j < part.n(); ++j) {
        const Eigen::VectorXd z = part.rows.row(j).transpose() - mu;
        sum += z / (1.0 + margin_or_throw(part, mu, lam, j));
    }
    return -sum / static_cast<double>(part.n());
}

Eigen::MatrixXd dual_hessian(const Partition& part, const Eigen::VectorXd& mu,
                             const Eigen::VectorXd& lam) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(part.dim(), part.dim());
    for (Eigen::Index j = 0; j < part.n(); ++j) {
        const Eigen::VectorXd z = part.rows.row(j).transpose() - mu;
        const double t = 1.0 + margin_or_throw(part, mu, lam, j);
        sum += (z * z.transpose()) / (t * t);
    }
    return sum / static_cast<double>(part.n());
}

}  // namespace delfi::reference
