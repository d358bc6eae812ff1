#pragma once

#include <optional>

#include "delfi/partition.hpp"

namespace delfi {

// Value, gradient and (on demand) Hessian of the local dual objective
//   g(lambda) = -n^{-1} sum_j log(1 + lambda'(x_j - mu)).
struct DualEval {
    double value = 0.0;
    Eigen::VectorXd gradient;
    std::optional<Eigen::MatrixXd> hessian;
};

// Fused evaluation. Throws InfeasibleMultiplier if any log argument <= 0.
DualEval dual_eval(const Partition& part, const Eigen::VectorXd& mu,
                   const Eigen::VectorXd& lam, bool with_hessian = false);

double dual_value(const Partition& part, const Eigen::VectorXd& mu,
                  const Eigen::VectorXd& lam);

// -n^{-1} sum_j (x_j - mu) / (1 + lambda'(x_j - mu))
Eigen::VectorXd dual_gradient(const Partition& part, const Eigen::VectorXd& mu,
                              const Eigen::VectorXd& lam);

// n^{-1} sum_j (x_j - mu)(x_j - mu)' / (1 + lambda'(x_j - mu))^2, symmetric PSD
Eigen::MatrixXd dual_hessian(const Partition& part, const Eigen::VectorXd& mu,
                             const Eigen::VectorXd& lam);

// One partition's term of the log-likelihood-ratio statistic:
//   2 sum_j log(1 + lambda'(x_j - mu)) = -2 n g(lambda).
double elr_contribution(const Partition& part, const Eigen::VectorXd& mu,
                        const Eigen::VectorXd& lam);

// Single pass used by the line search. value is NaN when min_margin <= 0.
struct MarginScan {
    double min_margin;  // min_j 1 + lambda'(x_j - mu)
    double value;
};
MarginScan margin_and_value(const Partition& part, const Eigen::VectorXd& mu,
                            const Eigen::VectorXd& lam);

}  // namespace delfi
