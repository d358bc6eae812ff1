#pragma once

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <vector>

#include "delfi/errors.hpp"

namespace delfi {

// Contour of a 2-d statistic at a chi-squared quantile, traced along rays.
struct RegionTrace {
    Eigen::Vector2d center;
    double level = 0.0;
    struct Point {
        double angle;         // radians, ascending
        Eigen::Vector2d mu;
        double statistic;
    };
    std::vector<Point> boundary;
};

// Statistic as a function of the hypothesized 2-d mean; may throw HullViolation.
using StatFn = std::function<double(const Eigen::Vector2d&)>;

struct TraceOptions {
    int angles = 64;
    double stat_tol = 1e-6;       // |statistic - quantile| at every boundary point
    double initial_radius = 0.0;  // 0 -> scale from the center
    int max_expansions = 80;
    int max_bisections = 200;
};

// For each of `angles` directions from the center: expand a radius bracket
// until the statistic crosses the level quantile (a HullViolation brackets
// from above), then bisect to stat_tol. Requires statfn(center) < quantile.
RegionTrace trace_region(const StatFn& statfn, const Eigen::Vector2d& center,
                         double level, const TraceOptions& opts = {});

// CSV: header angle,mu1,mu2,statistic
void write_region_csv(std::ostream& out, const RegionTrace& trace);

}  // namespace delfi
