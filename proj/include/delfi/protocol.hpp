#pragma once

#include <functional>
#include <optional>

#include "delfi/solver.hpp"
#include "delfi/transport.hpp"

namespace delfi {

struct RoundTrace {
    int round = 0;                                   // t, 0-based
    Eigen::VectorXd lambda_t;                        // multiplier at round start
    Eigen::VectorXd global_gradient;                 // averaged gradient at lambda_t
    std::vector<Eigen::VectorXd> per_worker_lambda;  // surrogate minimizers, ascending machine id
    double step_change = 0.0;                        // ||lambda_{t+1} - lambda_t||
};

struct DelResult {
    Eigen::VectorXd lambda;
    int rounds_run = 0;
    std::vector<RoundTrace> traces;
    double statistic = 0.0;
    std::vector<int> participating;  // ascending machine ids
};

// Number of rounds: override if given, else max(2, floor(log K / log n) + 1).
// The floor is computed in exact integer arithmetic.
int round_count(long K, long n, std::optional<int> override_rounds = {});

// Applied to a worker's upstream gradient payload before the coordinator sees
// it (Byzantine transmission). Identity when empty.
using GradientTamper = std::function<Eigen::VectorXd(int machine_id, const Eigen::VectorXd&)>;

struct DelOptions {
    Eigen::VectorXd lambda0;      // empty -> zero vector
    int rounds = 0;               // 0 -> round_count(K, n)
    bool warm_start = false;      // lambda0 from machine 1's local minimizer
    double early_exit_tol = 1e-12;
    SolverOptions solver;
    Transport* transport = nullptr;
    GradientTamper tamper;
};

// Multi-round coordinator/worker protocol. Each round: workers send local
// gradients, the coordinator broadcasts their average, workers minimize the
// gradient-corrected surrogate from the current iterate, the coordinator
// broadcasts the averaged minimizer. Ends with the statistic assembled from
// per-machine contributions at the final multiplier.
DelResult run_del(const Cluster& cluster, const Eigen::VectorXd& mu,
                  const DelOptions& opts = {});

// Sum of per-partition contributions, ascending machine id.
double elr_statistic(const Cluster& cluster, const Eigen::VectorXd& mu,
                     const Eigen::VectorXd& lam);

}  // namespace delfi
