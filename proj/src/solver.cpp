#include "delfi/solver.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <string>

namespace delfi {

namespace {

double max_row_norm(const Partition& part, const Eigen::VectorXd& mu) {
    double m = 0.0;
    for (Eigen::Index j = 0; j < part.n(); ++j)
        m = std::max(m, (part.rows.row(j).transpose() - mu).norm());
    return m;
}

// LDLT with a diagonal jitter retry on factorization failure.
Eigen::VectorXd solve_newton_step(Eigen::MatrixXd h, const Eigen::VectorXd& rhs,
                                  double jitter, int machine_id) {
    for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
        if (ldlt.info() == Eigen::Success) {
            Eigen::VectorXd step = ldlt.solve(rhs);
            if (step.allFinite()) return step;
        }
        h.diagonal().array() += jitter;
        jitter *= 1e3;
    }
    throw MaxIterations("Newton system could not be factorized on machine " +
                            std::to_string(machine_id),
                        machine_id);
}

}  // namespace

SolveOutcome shifted_minimize(const Partition& part, const Eigen::VectorXd& mu,
                              const Eigen::VectorXd& shift, const Eigen::VectorXd& lam_init,
                              const SolverOptions& opts) {
    if (shift.size() != part.dim() || !shift.allFinite())
        throw InvalidConfig("shift has wrong size or non-finite entries");

    const double n = static_cast<double>(part.n());
    const double margin_floor = 1.0 / (2.0 * n);

    Eigen::VectorXd lam = lam_init.size() == 0
                              ? Eigen::VectorXd::Zero(part.dim()).eval()
                              : lam_init;
    {
        MarginScan scan = margin_and_value(part, mu, lam);
        if (scan.min_margin <= 0.0)
            throw InfeasibleMultiplier("initial multiplier infeasible on machine " +
                                           std::to_string(part.machine_id),
                                       part.machine_id);
    }

    const double row_scale = max_row_norm(part, mu);
    if (row_scale == 0.0) {
        // every observation equals mu: the dual is linear in lambda
        const double gn = shift.norm();
        if (gn <= opts.grad_tol) return {lam, 0, true, gn};
        throw HullViolation("mu coincides with every observation on machine " +
                                std::to_string(part.machine_id),
                            part.machine_id);
    }
    const double diverge_bound = opts.divergence_factor * n / row_scale;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        DualEval eval = dual_eval(part, mu, lam, true);
        Eigen::VectorXd grad = eval.gradient + shift;
        const double gnorm = grad.norm();
        if (gnorm <= opts.grad_tol) return {lam, iter, true, gnorm};
        if (lam.norm() > diverge_bound)
            throw HullViolation("dual iteration diverged on machine " +
                                    std::to_string(part.machine_id) +
                                    ": mu outside the local data hull",
                                part.machine_id);

        Eigen::VectorXd step =
            solve_newton_step(*eval.hessian, -grad, opts.jitter, part.machine_id);
        const double f0 = eval.value + shift.dot(lam);

        bool accepted = false;
        double alpha = 1.0;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            Eigen::VectorXd cand = lam + alpha * step;
            MarginScan scan = margin_and_value(part, mu, cand);
            if (scan.min_margin >= margin_floor) {
                const double f_cand = scan.value + shift.dot(cand);
                // tolerance admits rounding-level ties near the optimum
                if (f_cand <= f0 + 1e-15 * (1.0 + std::fabs(f0))) {
                    lam = std::move(cand);
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted)
            throw MaxIterations("line search found no feasible decrease on machine " +
                                    std::to_string(part.machine_id),
                                part.machine_id);
    }
    throw MaxIterations("no convergence within " + std::to_string(opts.max_iterations) +
                            " Newton steps on machine " + std::to_string(part.machine_id),
                        part.machine_id);
}

}  // namespace delfi
