#pragma once

#include "delfi/partition.hpp"

// Plain serial left-to-right implementations of the dual kernels. Kept as the
// reference the blocked OpenMP kernels are tested and benchmarked against.
namespace delfi::reference {

double dual_value(const Partition& part, const Eigen::VectorXd& mu,
                  const Eigen::VectorXd& lam);

Eigen::VectorXd dual_gradient(const Partition& part, const Eigen::VectorXd& mu,
                              const Eigen::VectorXd& lam);

Eigen::MatrixXd dual_hessian(const Partition& part, const Eigen::VectorXd& mu,
                             const Eigen::VectorXd& lam);

}  // namespace delfi::reference
