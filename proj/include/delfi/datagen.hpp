#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "delfi/chi2.hpp"
#include "delfi/rng.hpp"
#include "delfi/selection.hpp"

namespace delfi {

// The two simulation designs: equicorrelated normal and a correlated
// exponential mixture.
struct GeneratorSpec {
    enum class Family { EquicorrelatedNormal, JointExponential };
    Family family = Family::EquicorrelatedNormal;
    int d = 5;
    double rho = 0.5;             // normal: off-diagonal correlation
    double decay = 0.5;           // exponential: mixing entries decay^|a-b|
    Eigen::VectorXd mean_shift;   // normal only; empty -> zero
    double rate_shift = 0.0;      // exponential: coordinate rate = 1 + rate_shift
    std::uint64_t seed = 0;

    Eigen::MatrixXd sigma2() const;      // exponential mixing matrix
    Eigen::VectorXd true_mean() const;   // includes the shift
    Eigen::VectorXd base_mean() const;   // at zero shift (the H0 point)
};

// x = sqrt(rho) z0 1 + sqrt(1-rho) z: unit variances, correlation rho.
RowMatrixXd normal_draw(int d, double rho, Eigen::Index n, SubstreamRng& stream);

// rows are Sigma2 * E with E iid exponential(rate) coordinates.
RowMatrixXd exponential_draw(int d, double decay, double rate, Eigen::Index n,
                             SubstreamRng& stream);

enum class ByzMode { MeanShift, GradientTamper };
enum class McMetric { TypeI, Coverage, Power };

struct ExperimentDesign {
    long N = 10000;
    int K = 50;
    int d = 5;
    GeneratorSpec generator;
    int n_byzantine = 0;
    double delta_b = 0.3;
    ByzMode byz_mode = ByzMode::MeanShift;
    double alpha = 0.05;
    double level = 0.90;  // coverage confidence level
    int repetitions = 1000;
    std::vector<ElTestReport::Method> methods{ElTestReport::Method::DEL};
    Eigen::VectorXd mu0;            // empty -> generator base mean
    long central_budget = 200000;   // pooled EL runs only when N fits
    double a = 2.0;                 // selection threshold constant
    int rounds = 0;                 // 0 -> default rule
    McMetric metric = McMetric::TypeI;
    std::vector<double> shifts;     // power grid

    long n() const { return N / K; }
    Eigen::VectorXd hypothesis() const;  // mu0 or the generator base mean
    void validate() const;
};

// K partitions of n rows. The first K - n_byzantine machines draw from the
// design generator; in mean-shift mode the rest draw with mean delta_b * 1
// (normal) or rate 1 + delta_b (exponential); in tamper mode their data is
// honest and the returned behavior carries the gradient bias delta_b * 1.
// Machine i's stream is (seed, i, repetition).
std::pair<Cluster, std::vector<ByzantineBehavior>> generate_cluster(
    const ExperimentDesign& design, std::uint64_t repetition = 0);

}  // namespace delfi
