#pragma once

#include "delfi/dual.hpp"

namespace delfi {

struct SolverOptions {
    double grad_tol = 1e-10;        // absolute stationarity tolerance
    int max_iterations = 200;
    double divergence_factor = 1e3; // HullViolation when ||lambda|| > factor * n / max_j ||x_j - mu||
    double jitter = 1e-12;          // diagonal retry on factorization failure
    int max_backtracks = 60;
};

struct SolveOutcome {
    Eigen::VectorXd lambda;
    int iterations = 0;
    bool converged = false;
    double final_gradient_norm = 0.0;  // || grad g(lambda) + shift ||
};

// Minimizes g(lambda) + shift'lambda over the dual feasible region by damped
// Newton with a feasibility-preserving backtracking line search (step halved
// until min_j 1 + lambda'(x_j - mu) >= 1/(2n) and the objective decreases).
// shift = 0 recovers the plain local solver argmin g.
SolveOutcome shifted_minimize(const Partition& part, const Eigen::VectorXd& mu,
                              const Eigen::VectorXd& shift, const Eigen::VectorXd& lam_init,
                              const SolverOptions& opts = {});

}  // namespace delfi
