#include "delfi/partition.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace delfi {

void validate_cluster(const Cluster& cluster) {
    if (cluster.empty()) throw InvalidConfig("cluster is empty");
    const Eigen::Index n = cluster.front().n();
    const Eigen::Index d = cluster.front().dim();
    if (n < 1) throw InvalidConfig("partition has no rows");
    if (d < 1) throw InvalidConfig("partition has no columns");
    std::set<int> ids;
    for (const Partition& p : cluster) {
        if (p.n() != n || p.dim() != d)
            throw InvalidConfig("partition " + std::to_string(p.machine_id) +
                                " does not match the cluster shape");
        if (!ids.insert(p.machine_id).second)
            throw InvalidConfig("duplicate machine id " + std::to_string(p.machine_id));
        if (!p.rows.allFinite())
            throw InvalidConfig("partition " + std::to_string(p.machine_id) +
                                " contains a non-finite value");
    }
}

Partition pool(const Cluster& cluster) {
    validate_cluster(cluster);
    std::vector<const Partition*> order;
    order.reserve(cluster.size());
    for (const Partition& p : cluster) order.push_back(&p);
    std::sort(order.begin(), order.end(),
              [](const Partition* a, const Partition* b) { return a->machine_id < b->machine_id; });

    const Eigen::Index n = cluster.front().n();
    const Eigen::Index d = cluster.front().dim();
    Partition out;
    out.machine_id = 0;
    out.rows.resize(n * static_cast<Eigen::Index>(cluster.size()), d);
    Eigen::Index at = 0;
    for (const Partition* p : order) {
        out.rows.middleRows(at, n) = p->rows;
        at += n;
    }
    return out;
}

}  // namespace delfi
