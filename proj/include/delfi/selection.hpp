#pragma once

#include <optional>
#include <utility>

#include "delfi/protocol.hpp"

namespace delfi {

// Fault model of one machine, fixed for the whole experiment.
struct ByzantineBehavior {
    enum class Kind {
        Honest,
        MeanShifted,    // data drawn with a shifted mean; protocol-honest
        TamperReplace,  // every upstream gradient payload replaced by param
        TamperBias,     // param added to every upstream gradient payload
    };
    Kind kind = Kind::Honest;
    Eigen::VectorXd param;

    bool tampers() const {
        return kind == Kind::TamperReplace || kind == Kind::TamperBias;
    }
    static ByzantineBehavior honest() { return {}; }
    static ByzantineBehavior mean_shifted(Eigen::VectorXd delta);
    static ByzantineBehavior tamper_replace(Eigen::VectorXd payload);
    static ByzantineBehavior tamper_bias(Eigen::VectorXd bias);
};

// data: gradients computed from the stored (possibly mean-shifted) data.
// received-gradient: tampering machines rewrite their payload before the
// coordinator sees it.
enum class SelectionMode { Data, ReceivedGradient };

struct SelectionOutcome {
    double gamma_n = 0.0;
    std::vector<int> counts;       // s_i, ascending machine id
    std::vector<int> selected;     // machine ids with s_i > K/2, ascending
    Eigen::VectorXd pilot_mu;      // geometric median of the local means
    Eigen::VectorXd pilot_lambda;  // zero unless a trusted pilot is configured
};

struct DelSResult {
    SelectionOutcome selection;
    DelResult del;          // protocol result over the selected partitions
    double statistic = 0.0; // sum over selected machines
};

// Weiszfeld iteration with the standard coincident-point (subgradient) handling.
// First-order optimality ||sum_i (y - p_i)/||y - p_i|| || <= 1e-8 * K on return.
Eigen::VectorXd geometric_median(const std::vector<Eigen::VectorXd>& points,
                                 int max_iterations = 500, double step_tol = 1e-10);

// a * n^{-1/2} * log K (natural log)
double default_threshold(long n, long K, double a);

// s_i = #{i' : ||h_i' - h_i|| < gamma_n} (strict; self counts),
// S = {i : s_i > K/2} (strict).
SelectionOutcome select_machines(const std::vector<std::pair<int, Eigen::VectorXd>>& gradients,
                                 double gamma_n);

struct SelectionGradients {
    Eigen::VectorXd pilot_mu;
    Eigen::VectorXd pilot_lambda;
    std::vector<std::pair<int, Eigen::VectorXd>> gradients;  // as received
};

// Pilot mean = geometric median of the local sample means; pilot multiplier
// defaults to zero (trusted_machine switches to that machine's local
// minimizer at the pilot mean). Gradients are evaluated at the pilot pair.
SelectionGradients collect_selection_gradients(const Cluster& cluster,
                                               const std::vector<ByzantineBehavior>& behaviors,
                                               SelectionMode mode,
                                               std::optional<int> trusted_machine = {});

struct DelSOptions {
    double a = 2.0;
    std::optional<double> gamma_n;       // overrides the default threshold rule
    SelectionMode mode = SelectionMode::Data;
    std::optional<int> trusted_machine;  // trusted pilot multiplier, off by default
    DelOptions del;
};

// Selection followed by the multi-round protocol restricted to the selected
// machines. Throws SelectionDegenerate when |S| <= K/2.
DelSResult run_del_s(const Cluster& cluster, const std::vector<ByzantineBehavior>& behaviors,
                     const Eigen::VectorXd& mu, const DelSOptions& opts = {});

}  // namespace delfi
