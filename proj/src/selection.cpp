#include "delfi/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "delfi/parallel.hpp"

namespace delfi {

ByzantineBehavior ByzantineBehavior::mean_shifted(Eigen::VectorXd delta) {
    return {Kind::MeanShifted, std::move(delta)};
}
ByzantineBehavior ByzantineBehavior::tamper_replace(Eigen::VectorXd payload) {
    return {Kind::TamperReplace, std::move(payload)};
}
ByzantineBehavior ByzantineBehavior::tamper_bias(Eigen::VectorXd bias) {
    return {Kind::TamperBias, std::move(bias)};
}

Eigen::VectorXd geometric_median(const std::vector<Eigen::VectorXd>& points,
                                 int max_iterations, double step_tol) {
    if (points.empty()) throw InvalidConfig("geometric median of no points");
    const Eigen::Index d = points.front().size();
    for (const auto& p : points) {
        if (p.size() != d) throw InvalidConfig("geometric median: mixed dimensions");
        if (!p.allFinite()) throw InvalidConfig("geometric median: non-finite point");
    }
    const int K = static_cast<int>(points.size());

    double scale = 0.0;
    for (const auto& p : points) scale = std::max(scale, (p - points.front()).norm());
    const double coincide_eps = 1e-11 * std::max(scale, 1.0);
    const double opt_tol = 1e-8 * K;

    Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
    for (const auto& p : points) y += p;
    y /= static_cast<double>(K);

    for (int iter = 0; iter < max_iterations; ++iter) {
        Eigen::VectorXd pull = Eigen::VectorXd::Zero(d);  // sum (p_i - y)/d_i over non-coincident
        Eigen::VectorXd weighted = Eigen::VectorXd::Zero(d);
        double weight_sum = 0.0;
        int coincident = 0;
        for (const auto& p : points) {
            const double dist = (p - y).norm();
            if (dist <= coincide_eps) {
                ++coincident;
                continue;
            }
            pull += (p - y) / dist;
            weighted += p / dist;
            weight_sum += 1.0 / dist;
        }
        const double r = pull.norm();
        // first-order optimality; with coincident points the subgradient test
        // is ||pull|| <= multiplicity
        const double measure = coincident == 0 ? r : std::max(0.0, r - coincident);
        if (measure <= opt_tol) return y;
        if (weight_sum == 0.0) return y;  // every point coincides with y

        Eigen::VectorXd target = weighted / weight_sum;
        Eigen::VectorXd y_next;
        if (coincident == 0) {
            y_next = target;
        } else {
            const double beta = static_cast<double>(coincident) / r;  // < 1 since measure > 0
            y_next = (1.0 - beta) * target + beta * y;
        }
        const double step = (y_next - y).norm();
        y = std::move(y_next);
        if (step <= step_tol) return y;
    }
    return y;
}

double default_threshold(long n, long K, double a) {
    if (n < 2) throw InvalidConfig("threshold rule needs n >= 2");
    if (K < 2) throw InvalidConfig("threshold rule needs K >= 2");
    if (!(a > 0.0)) throw InvalidConfig("threshold constant a must be positive");
    return a * std::log(static_cast<double>(K)) / std::sqrt(static_cast<double>(n));
}

SelectionOutcome select_machines(const std::vector<std::pair<int, Eigen::VectorXd>>& gradients,
                                 double gamma_n) {
    const int K = static_cast<int>(gradients.size());
    if (K < 2) throw InvalidConfig("selection needs at least 2 gradients");
    if (!(gamma_n > 0.0)) throw InvalidConfig("selection threshold must be positive");
    const Eigen::Index d = gradients.front().second.size();
    for (const auto& [id, g] : gradients)
        if (g.size() != d) throw InvalidConfig("selection gradients: mixed dimensions");

    SelectionOutcome out;
    out.gamma_n = gamma_n;
    out.counts.assign(K, 0);
    for (int i = 0; i < K; ++i) {
        int s = 0;
        for (int j = 0; j < K; ++j) {
            if ((gradients[j].second - gradients[i].second).norm() < gamma_n) ++s;
        }
        out.counts[i] = s;  // self counts: distance 0 < gamma_n
    }
    for (int i = 0; i < K; ++i)
        if (2 * out.counts[i] > K) out.selected.push_back(gradients[i].first);
    std::sort(out.selected.begin(), out.selected.end());
    return out;
}

SelectionGradients collect_selection_gradients(const Cluster& cluster,
                                               const std::vector<ByzantineBehavior>& behaviors,
                                               SelectionMode mode,
                                               std::optional<int> trusted_machine) {
    validate_cluster(cluster);
    if (behaviors.size() != cluster.size())
        throw InvalidConfig("one behavior per machine required");
    const Eigen::Index d = cluster.front().dim();

    std::vector<Eigen::VectorXd> means(cluster.size());
    for (std::size_t i = 0; i < cluster.size(); ++i) means[i] = cluster[i].mean();

    SelectionGradients out;
    out.pilot_mu = geometric_median(means);
    out.pilot_lambda = Eigen::VectorXd::Zero(d);
    if (trusted_machine) {
        const auto it = std::find_if(cluster.begin(), cluster.end(), [&](const Partition& p) {
            return p.machine_id == *trusted_machine;
        });
        if (it == cluster.end())
            throw InvalidConfig("trusted machine " + std::to_string(*trusted_machine) +
                                " is not in the cluster");
        out.pilot_lambda = shifted_minimize(*it, out.pilot_mu, Eigen::VectorXd::Zero(d),
                                            Eigen::VectorXd::Zero(d))
                               .lambda;
    }

    out.gradients.resize(cluster.size());
    std::vector<Eigen::VectorXd> honest(cluster.size());
    parallel_for_indexed(static_cast<std::ptrdiff_t>(cluster.size()), [&](std::ptrdiff_t i) {
        honest[i] = dual_gradient(cluster[i], out.pilot_mu, out.pilot_lambda);
    });
    for (std::size_t i = 0; i < cluster.size(); ++i) {
        Eigen::VectorXd payload = honest[i];
        if (mode == SelectionMode::ReceivedGradient) {
            switch (behaviors[i].kind) {
                case ByzantineBehavior::Kind::TamperReplace:
                    payload = behaviors[i].param;
                    break;
                case ByzantineBehavior::Kind::TamperBias:
                    payload += behaviors[i].param;
                    break;
                default:
                    break;
            }
        }
        out.gradients[i] = {cluster[i].machine_id, std::move(payload)};
    }
    std::sort(out.gradients.begin(), out.gradients.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

DelSResult run_del_s(const Cluster& cluster, const std::vector<ByzantineBehavior>& behaviors,
                     const Eigen::VectorXd& mu, const DelSOptions& opts) {
    validate_cluster(cluster);
    if (behaviors.size() != cluster.size())
        throw InvalidConfig("one behavior per machine required");
    const int K = static_cast<int>(cluster.size());
    const long n = static_cast<long>(cluster.front().n());

    const double gamma = opts.gamma_n ? *opts.gamma_n : default_threshold(n, K, opts.a);
    SelectionGradients collected =
        collect_selection_gradients(cluster, behaviors, opts.mode, opts.trusted_machine);

    DelSResult result;
    result.selection = select_machines(collected.gradients, gamma);
    result.selection.pilot_mu = collected.pilot_mu;
    result.selection.pilot_lambda = collected.pilot_lambda;

    if (2 * static_cast<long>(result.selection.selected.size()) <= K)
        throw SelectionDegenerate(
            "selected " + std::to_string(result.selection.selected.size()) + " of " +
            std::to_string(K) + " machines: no strict majority, the honest-majority "
            "assumption does not hold");

    Cluster sub;
    std::vector<const ByzantineBehavior*> sub_behaviors;
    for (std::size_t i = 0; i < cluster.size(); ++i) {
        if (std::binary_search(result.selection.selected.begin(), result.selection.selected.end(),
                               cluster[i].machine_id)) {
            sub.push_back(cluster[i]);
            sub_behaviors.push_back(&behaviors[i]);
        }
    }

    DelOptions del_opts = opts.del;
    if (opts.mode == SelectionMode::ReceivedGradient) {
        // a tampering machine that slipped through keeps tampering every round
        bool any_tamper = false;
        std::map<int, const ByzantineBehavior*> by_id;
        for (std::size_t i = 0; i < sub.size(); ++i) {
            by_id[sub[i].machine_id] = sub_behaviors[i];
            any_tamper = any_tamper || sub_behaviors[i]->tampers();
        }
        if (any_tamper) {
            GradientTamper upstream = [by_id](int machine_id, const Eigen::VectorXd& g) {
                const auto it = by_id.find(machine_id);
                if (it == by_id.end()) return g;
                switch (it->second->kind) {
                    case ByzantineBehavior::Kind::TamperReplace:
                        return it->second->param;
                    case ByzantineBehavior::Kind::TamperBias:
                        return Eigen::VectorXd(g + it->second->param);
                    default:
                        return g;
                }
            };
            del_opts.tamper = std::move(upstream);
        }
    }

    result.del = run_del(sub, mu, del_opts);
    result.statistic = result.del.statistic;
    return result;
}

}  // namespace delfi
