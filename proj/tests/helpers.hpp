#pragma once

#include <initializer_list>
#include <random>
#include <vector>

#include "delfi/partition.hpp"

namespace delfi::testing {

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

inline Partition scalar_partition(std::initializer_list<double> xs, int machine_id = 1) {
    Partition p;
    p.machine_id = machine_id;
    p.rows.resize(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs) p.rows(i++, 0) = x;
    return p;
}

inline Partition random_partition(Eigen::Index n, Eigen::Index d, unsigned seed,
                                  int machine_id = 1) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> normal;
    Partition p;
    p.machine_id = machine_id;
    p.rows.resize(n, d);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index a = 0; a < d; ++a) p.rows(j, a) = normal(eng);
    return p;
}

// lambda with feasibility margin comfortably above zero for the partition
inline Eigen::VectorXd random_feasible_lambda(const Partition& part, const Eigen::VectorXd& mu,
                                              unsigned seed, double inside = 0.3) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd dir(part.dim());
    for (Eigen::Index a = 0; a < part.dim(); ++a) dir(a) = normal(eng);
    dir.normalize();
    double max_norm = 0.0;
    for (Eigen::Index j = 0; j < part.n(); ++j)
        max_norm = std::max(max_norm, (part.rows.row(j).transpose() - mu).norm());
    std::uniform_real_distribution<double> mag(0.0, inside);
    return Eigen::VectorXd(dir * mag(eng) / std::max(max_norm, 1e-12));
}

}  // namespace delfi::testing
