#pragma once

#include <Eigen/Core>
#include <vector>

#include "delfi/errors.hpp"

namespace delfi {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One machine's local block of observations, the unit of data locality.
struct Partition {
    int machine_id = 0;  // 1..K within a cluster; 0 for pooled/anonymous blocks
    RowMatrixXd rows;    // n x d, one observation per row

    Eigen::Index n() const { return rows.rows(); }
    Eigen::Index dim() const { return rows.cols(); }
    Eigen::VectorXd mean() const { return rows.colwise().mean().transpose(); }
};

using Cluster = std::vector<Partition>;

// Shared n and d, ids unique, n >= 1, every entry finite.
void validate_cluster(const Cluster& cluster);

// All rows stacked in ascending machine_id order, machine_id 0.
Partition pool(const Cluster& cluster);

}  // namespace delfi
