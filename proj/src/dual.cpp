#include "delfi/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "delfi/parallel.hpp"

namespace delfi {

namespace {

// Fixed block grid: per-block partials are accumulated left to right and then
// combined in block order, so the sums do not depend on the thread count.
constexpr Eigen::Index kRowBlock = 1024;

struct BlockAccum {
    double log_sum = 0.0;
    double min_margin = std::numeric_limits<double>::infinity();
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

void check_inputs(const Partition& part, const Eigen::VectorXd& mu,
                  const Eigen::VectorXd& lam) {
    if (part.n() < 1) throw InvalidConfig("partition has no rows");
    if (mu.size() != part.dim() || lam.size() != part.dim())
        throw InvalidConfig("dimension mismatch: partition d=" + std::to_string(part.dim()) +
                            ", mu d=" + std::to_string(mu.size()) +
                            ", lambda d=" + std::to_string(lam.size()));
}

void throw_infeasible(const Partition& part, double min_margin) {
    throw InfeasibleMultiplier(
        "multiplier infeasible on machine " + std::to_string(part.machine_id) +
            ": min 1 + lambda'(x - mu) = " + std::to_string(min_margin),
        part.machine_id);
}

}  // namespace

DualEval dual_eval(const Partition& part, const Eigen::VectorXd& mu,
                   const Eigen::VectorXd& lam, bool with_hessian) {
    check_inputs(part, mu, lam);
    const Eigen::Index n = part.n();
    const Eigen::Index d = part.dim();
    const Eigen::Index blocks = (n + kRowBlock - 1) / kRowBlock;

    std::vector<BlockAccum> acc(static_cast<std::size_t>(blocks));
    parallel_for_indexed(blocks, [&](std::ptrdiff_t b) {
        BlockAccum& a = acc[static_cast<std::size_t>(b)];
        a.grad = Eigen::VectorXd::Zero(d);
        if (with_hessian) a.hess = Eigen::MatrixXd::Zero(d, d);
        const Eigen::Index lo = static_cast<Eigen::Index>(b) * kRowBlock;
        const Eigen::Index hi = std::min(lo + kRowBlock, n);
        Eigen::VectorXd z(d);
        for (Eigen::Index j = lo; j < hi; ++j) {
            z = part.rows.row(j).transpose() - mu;
            const double u = lam.dot(z);
            const double t = 1.0 + u;
            if (t < a.min_margin) a.min_margin = t;
            if (t <= 0.0) continue;  // reported after the scan
            a.log_sum += std::log1p(u);
            a.grad += z / t;
            if (with_hessian) a.hess += (z * z.transpose()) / (t * t);
        }
    });

    BlockAccum total;
    total.grad = Eigen::VectorXd::Zero(d);
    if (with_hessian) total.hess = Eigen::MatrixXd::Zero(d, d);
    for (const BlockAccum& a : acc) {
        total.log_sum += a.log_sum;
        total.min_margin = std::min(total.min_margin, a.min_margin);
        total.grad += a.grad;
        if (with_hessian) total.hess += a.hess;
    }
    if (total.min_margin <= 0.0) throw_infeasible(part, total.min_margin);

    DualEval out;
    out.value = -total.log_sum / static_cast<double>(n);
    out.gradient = -total.grad / static_cast<double>(n);
    if (with_hessian) {
        Eigen::MatrixXd h = total.hess / static_cast<double>(n);
        out.hessian = 0.5 * (h + h.transpose());
    }
    return out;
}

double dual_value(const Partition& part, const Eigen::VectorXd& mu,
                  const Eigen::VectorXd& lam) {
    MarginScan scan = margin_and_value(part, mu, lam);
    if (scan.min_margin <= 0.0) throw_infeasible(part, scan.min_margin);
    return scan.value;
}

Eigen::VectorXd dual_gradient(const Partition& part, const Eigen::VectorXd& mu,
                              const Eigen::VectorXd& lam) {
    return dual_eval(part, mu, lam, false).gradient;
}

Eigen::MatrixXd dual_hessian(const Partition& part, const Eigen::VectorXd& mu,
                             const Eigen::VectorXd& lam) {
    return *dual_eval(part, mu, lam, true).hessian;
}

double elr_contribution(const Partition& part, const Eigen::VectorXd& mu,
                        const Eigen::VectorXd& lam) {
    return -2.0 * static_cast<double>(part.n()) * dual_value(part, mu, lam);
}

MarginScan margin_and_value(const Partition& part, const Eigen::VectorXd& mu,
                            const Eigen::VectorXd& lam) {
    check_inputs(part, mu, lam);
    const Eigen::Index n = part.n();
    const Eigen::Index blocks = (n + kRowBlock - 1) / kRowBlock;

    std::vector<double> log_sums(static_cast<std::size_t>(blocks), 0.0);
    std::vector<double> margins(static_cast<std::size_t>(blocks),
                                std::numeric_limits<double>::infinity());
    parallel_for_indexed(blocks, [&](std::ptrdiff_t b) {
        const Eigen::Index lo = static_cast<Eigen::Index>(b) * kRowBlock;
        const Eigen::Index hi = std::min(lo + kRowBlock, n);
        double ls = 0.0;
        double mm = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = lo; j < hi; ++j) {
            const double u = lam.dot(part.rows.row(j).transpose() - mu);
            const double t = 1.0 + u;
            if (t < mm) mm = t;
            if (t > 0.0) ls += std::log1p(u);
        }
        log_sums[static_cast<std::size_t>(b)] = ls;
        margins[static_cast<std::size_t>(b)] = mm;
    });

    MarginScan out{std::numeric_limits<double>::infinity(), 0.0};
    double log_sum = 0.0;
    for (std::size_t b = 0; b < log_sums.size(); ++b) {
        log_sum += log_sums[b];
        out.min_margin = std::min(out.min_margin, margins[b]);
    }
    out.value = out.min_margin > 0.0 ? -log_sum / static_cast<double>(n)
                                     : std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace delfi
