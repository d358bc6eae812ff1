#include "delfi/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "delfi/parallel.hpp"

namespace delfi {

Eigen::MatrixXd GeneratorSpec::sigma2() const {
    Eigen::MatrixXd s(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) s(a, b) = std::pow(decay, std::abs(a - b));
    return s;
}

Eigen::VectorXd GeneratorSpec::base_mean() const {
    if (family == Family::EquicorrelatedNormal) return Eigen::VectorXd::Zero(d);
    return sigma2() * Eigen::VectorXd::Ones(d);  // rate-1 coordinates
}

Eigen::VectorXd GeneratorSpec::true_mean() const {
    if (family == Family::EquicorrelatedNormal) {
        Eigen::VectorXd m = Eigen::VectorXd::Zero(d);
        if (mean_shift.size() != 0) m += mean_shift;
        return m;
    }
    return sigma2() * Eigen::VectorXd::Ones(d) / (1.0 + rate_shift);
}

RowMatrixXd normal_draw(int d, double rho, Eigen::Index n, SubstreamRng& stream) {
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidConfig("rho must be in [0, 1)");
    const double shared = std::sqrt(rho);
    const double own = std::sqrt(1.0 - rho);
    RowMatrixXd out(n, d);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double z0 = stream.normal();
        for (int a = 0; a < d; ++a) out(j, a) = shared * z0 + own * stream.normal();
    }
    return out;
}

RowMatrixXd exponential_draw(int d, double decay, double rate, Eigen::Index n,
                             SubstreamRng& stream) {
    if (!(decay >= 0.0 && decay < 1.0)) throw InvalidConfig("decay must be in [0, 1)");
    if (!(rate > 0.0)) throw InvalidConfig("exponential rate must be positive");
    Eigen::MatrixXd mix(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) mix(a, b) = std::pow(decay, std::abs(a - b));
    RowMatrixXd out(n, d);
    Eigen::VectorXd e(d);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (int a = 0; a < d; ++a) e(a) = stream.exponential(rate);
        out.row(j) = (mix * e).transpose();
    }
    return out;
}

Eigen::VectorXd ExperimentDesign::hypothesis() const {
    if (mu0.size() != 0) return mu0;
    return generator.base_mean();
}

void ExperimentDesign::validate() const {
    if (K < 1) throw InvalidConfig("K must be >= 1");
    if (N < K) throw InvalidConfig("N must be >= K");
    if (N % K != 0)
        throw InvalidConfig("N = " + std::to_string(N) + " is not divisible by K = " +
                            std::to_string(K));
    if (d < 1) throw InvalidConfig("d must be >= 1");
    if (generator.d != d) throw InvalidConfig("generator dimension does not match the design");
    if (n_byzantine < 0 || n_byzantine >= K)
        throw InvalidConfig("n_byzantine must be in [0, K)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfig("alpha must be in (0, 1)");
    if (!(level > 0.0 && level < 1.0)) throw InvalidConfig("level must be in (0, 1)");
    if (repetitions < 1) throw InvalidConfig("repetitions must be >= 1");
    if (methods.empty()) throw InvalidConfig("no methods requested");
    if (mu0.size() != 0 && mu0.size() != d) throw InvalidConfig("mu0 dimension mismatch");
    if (generator.family == GeneratorSpec::Family::JointExponential &&
        1.0 + generator.rate_shift <= 0.0)
        throw InvalidConfig("exponential rate 1 + shift must be positive");
    if (byz_mode == ByzMode::MeanShift && n_byzantine > 0 &&
        generator.family == GeneratorSpec::Family::JointExponential &&
        1.0 + delta_b <= 0.0)
        throw InvalidConfig("Byzantine exponential rate 1 + delta_b must be positive");
}

std::pair<Cluster, std::vector<ByzantineBehavior>> generate_cluster(
    const ExperimentDesign& design, std::uint64_t repetition) {
    design.validate();
    const Eigen::Index n = design.n();
    const int K = design.K;
    const int honest_count = K - design.n_byzantine;

    Cluster cluster(static_cast<std::size_t>(K));
    std::vector<ByzantineBehavior> behaviors(static_cast<std::size_t>(K));
    const Eigen::VectorXd byz_delta =
        Eigen::VectorXd::Constant(design.d, design.delta_b);

    parallel_for_indexed(K, [&](std::ptrdiff_t idx) {
        const int machine = static_cast<int>(idx) + 1;
        SubstreamRng stream(design.generator.seed, static_cast<std::uint64_t>(machine),
                            repetition);
        const bool byz = static_cast<int>(idx) >= honest_count;
        const bool shift_data = byz && design.byz_mode == ByzMode::MeanShift;

        Partition part;
        part.machine_id = machine;
        if (design.generator.family == GeneratorSpec::Family::EquicorrelatedNormal) {
            part.rows = normal_draw(design.d, design.generator.rho, n, stream);
            Eigen::RowVectorXd shift = Eigen::RowVectorXd::Zero(design.d);
            if (shift_data) {
                shift = byz_delta.transpose();  // corrupted source, not the design shift
            } else if (design.generator.mean_shift.size() != 0) {
                shift = design.generator.mean_shift.transpose();
            }
            if (!shift.isZero(0.0)) part.rows.rowwise() += shift;
        } else {
            const double rate = shift_data ? 1.0 + design.delta_b
                                           : 1.0 + design.generator.rate_shift;
            part.rows = exponential_draw(design.d, design.generator.decay, rate, n, stream);
        }
        cluster[static_cast<std::size_t>(idx)] = std::move(part);

        ByzantineBehavior b;
        if (byz) {
            b = design.byz_mode == ByzMode::MeanShift
                    ? ByzantineBehavior::mean_shifted(byz_delta)
                    : ByzantineBehavior::tamper_bias(byz_delta);
        }
        behaviors[static_cast<std::size_t>(idx)] = std::move(b);
    });
    return {std::move(cluster), std::move(behaviors)};
}

}  // namespace delfi
