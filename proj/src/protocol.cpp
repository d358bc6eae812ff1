#include "delfi/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "delfi/parallel.hpp"

namespace delfi {

int round_count(long K, long n, std::optional<int> override_rounds) {
    if (override_rounds) {
        if (*override_rounds < 1) throw InvalidConfig("round override must be >= 1");
        return *override_rounds;
    }
    if (K < 1) throw InvalidConfig("K must be >= 1");
    if (n < 2) throw InvalidConfig("per-machine sample size must be >= 2");
    // exact floor(log_n K): largest m with n^m <= K (floating log misfloors
    // exact powers, e.g. K=10^6, n=100)
    int m = 0;
    long power = 1;
    while (power <= K / n) {  // power * n <= K, overflow-safe
        power *= n;
        ++m;
    }
    return std::max(2, m + 1);
}

namespace {

std::vector<double> to_payload(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

void send(Transport* transport, Message::Tag tag, int machine_id, const Eigen::VectorXd& v) {
    if (transport == nullptr) return;
    transport->deliver({tag, static_cast<std::uint32_t>(machine_id), to_payload(v)});
}

void send_scalar(Transport* transport, Message::Tag tag, int machine_id, double x) {
    if (transport == nullptr) return;
    transport->deliver({tag, static_cast<std::uint32_t>(machine_id), {x}});
}

}  // namespace

DelResult run_del(const Cluster& cluster, const Eigen::VectorXd& mu, const DelOptions& opts) {
    validate_cluster(cluster);
    const int K = static_cast<int>(cluster.size());
    const Eigen::Index d = cluster.front().dim();
    const long n = static_cast<long>(cluster.front().n());
    if (mu.size() != d) throw InvalidConfig("mu dimension mismatch");
    if (opts.rounds < 0) throw InvalidConfig("round count cannot be negative");

    const int T = opts.rounds > 0 ? opts.rounds : round_count(K, n);

    const Partition* lowest = &cluster.front();
    for (const Partition& p : cluster)
        if (p.machine_id < lowest->machine_id) lowest = &p;

    Eigen::VectorXd lam;
    if (opts.warm_start) {
        // warm mode: the lowest-id machine's local minimizer
        lam = shifted_minimize(*lowest, mu, Eigen::VectorXd::Zero(d),
                               Eigen::VectorXd::Zero(d), opts.solver)
                  .lambda;
    } else if (opts.lambda0.size() == 0) {
        lam = Eigen::VectorXd::Zero(d);
    } else {
        if (opts.lambda0.size() != d) throw InvalidConfig("lambda0 dimension mismatch");
        lam = opts.lambda0;
    }

    for (const Partition& p : cluster) {
        if (margin_and_value(p, mu, lam).min_margin <= 0.0)
            throw InfeasibleMultiplier("initial multiplier infeasible on machine " +
                                           std::to_string(p.machine_id),
                                       p.machine_id);
    }

    // coordinator aggregation is ordered by ascending machine id regardless of
    // the caller's cluster order
    std::vector<std::size_t> order(cluster.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cluster[a].machine_id < cluster[b].machine_id;
    });

    DelResult result;
    result.participating.reserve(cluster.size());
    for (std::size_t i : order) result.participating.push_back(cluster[i].machine_id);

    std::vector<Eigen::VectorXd> grads(cluster.size());
    std::vector<Eigen::VectorXd> sent(cluster.size());
    std::vector<Eigen::VectorXd> minimizers(cluster.size());

    for (int t = 0; t < T; ++t) {
        // workers compute local gradients at the current iterate
        parallel_for_indexed(static_cast<std::ptrdiff_t>(cluster.size()), [&](std::ptrdiff_t k) {
            const Partition& part = cluster[order[static_cast<std::size_t>(k)]];
            grads[k] = dual_gradient(part, mu, lam);
            sent[k] = opts.tamper ? opts.tamper(part.machine_id, grads[k]) : grads[k];
        });
        Eigen::VectorXd global_grad = Eigen::VectorXd::Zero(d);
        for (std::size_t k = 0; k < order.size(); ++k) {
            send(opts.transport, Message::Tag::GradientUp, cluster[order[k]].machine_id, sent[k]);
            global_grad += sent[k];
        }
        global_grad /= static_cast<double>(K);
        send(opts.transport, Message::Tag::GradientBroadcast, 0, global_grad);

        // workers minimize the gradient-corrected surrogate from lam
        parallel_for_indexed(static_cast<std::ptrdiff_t>(cluster.size()), [&](std::ptrdiff_t k) {
            const Partition& part = cluster[order[static_cast<std::size_t>(k)]];
            Eigen::VectorXd shift = global_grad - grads[k];
            minimizers[k] = shifted_minimize(part, mu, shift, lam, opts.solver).lambda;
        });
        Eigen::VectorXd lam_next = Eigen::VectorXd::Zero(d);
        for (std::size_t k = 0; k < order.size(); ++k) {
            send(opts.transport, Message::Tag::MultiplierUp, cluster[order[k]].machine_id,
                 minimizers[k]);
            lam_next += minimizers[k];
        }
        lam_next /= static_cast<double>(K);
        send(opts.transport, Message::Tag::MultiplierBroadcast, 0, lam_next);

        RoundTrace trace;
        trace.round = t;
        trace.lambda_t = lam;
        trace.global_gradient = global_grad;
        trace.per_worker_lambda = minimizers;
        trace.step_change = (lam_next - lam).norm();
        result.traces.push_back(std::move(trace));

        lam = std::move(lam_next);
        result.rounds_run = t + 1;
        // fixed point reached; the remaining rounds would be no-ops
        if (result.traces.back().step_change < opts.early_exit_tol) break;
    }

    result.lambda = lam;
    result.statistic = 0.0;
    for (std::size_t k : order) {
        const double c = elr_contribution(cluster[k], mu, lam);
        send_scalar(opts.transport, Message::Tag::StatContribUp, cluster[k].machine_id, c);
        result.statistic += c;
    }
    return result;
}

double elr_statistic(const Cluster& cluster, const Eigen::VectorXd& mu,
                     const Eigen::VectorXd& lam) {
    validate_cluster(cluster);
    std::vector<std::size_t> order(cluster.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cluster[a].machine_id < cluster[b].machine_id;
    });
    double sum = 0.0;
    for (std::size_t k : order) sum += elr_contribution(cluster[k], mu, lam);
    return sum;
}

}  // namespace delfi
