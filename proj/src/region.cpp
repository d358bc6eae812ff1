#include "delfi/region.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "delfi/chi2.hpp"
#include "delfi/csvio.hpp"
#include "delfi/parallel.hpp"

namespace delfi {

namespace {

struct RayResult {
    RegionTrace::Point point;
};

RegionTrace::Point trace_ray(const StatFn& statfn, const Eigen::Vector2d& center,
                             double angle, double quantile, const TraceOptions& opts) {
    const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
    const double r0 = opts.initial_radius > 0.0
                          ? opts.initial_radius
                          : 1e-4 * (1.0 + center.norm());

    // expand until the statistic crosses the quantile; a HullViolation is an
    // upper bracket (the crossing sits before the hull)
    double lo = 0.0;
    double hi = r0;
    bool bracketed = false;
    for (int i = 0; i < opts.max_expansions; ++i) {
        double s;
        try {
            s = statfn(center + hi * dir);
        } catch (const HullViolation&) {
            bracketed = true;
            break;
        }
        if (s > quantile) {
            bracketed = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if (!bracketed)
        throw MaxIterations("no contour crossing along angle " + std::to_string(angle));

    for (int i = 0; i < opts.max_bisections; ++i) {
        const double mid = 0.5 * (lo + hi);
        try {
            const double s = statfn(center + mid * dir);
            if (std::fabs(s - quantile) <= opts.stat_tol)
                return {angle, center + mid * dir, s};
            if (s < quantile)
                lo = mid;
            else
                hi = mid;
        } catch (const HullViolation&) {
            hi = mid;
        }
        if (hi - lo <= 1e-15 * std::max(1.0, hi))
            throw Error("contour bracket collapsed at the hull boundary, angle " +
                        std::to_string(angle));
    }
    throw MaxIterations("contour bisection did not reach tolerance at angle " +
                        std::to_string(angle));
}

}  // namespace

RegionTrace trace_region(const StatFn& statfn, const Eigen::Vector2d& center,
                         double level, const TraceOptions& opts) {
    if (!(level > 0.0 && level < 1.0)) throw InvalidConfig("confidence level must be in (0, 1)");
    if (opts.angles < 1) throw InvalidConfig("need at least one trace angle");
    const double quantile = chi2_quantile(level, 2);
    const double s0 = statfn(center);
    if (!(s0 < quantile))
        throw CenterOutsideRegion("statistic at the center (" + std::to_string(s0) +
                                  ") is not below the level quantile (" +
                                  std::to_string(quantile) + ")");

    RegionTrace trace;
    trace.center = center;
    trace.level = level;
    trace.boundary.resize(static_cast<std::size_t>(opts.angles));
    parallel_for_indexed(opts.angles, [&](std::ptrdiff_t k) {
        const double angle =
            2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(opts.angles);
        trace.boundary[static_cast<std::size_t>(k)] =
            trace_ray(statfn, center, angle, quantile, opts);
    });
    return trace;
}

void write_region_csv(std::ostream& out, const RegionTrace& trace) {
    out << "angle,mu1,mu2,statistic\n";
    for (const auto& p : trace.boundary) {
        out << format_double(p.angle) << ',' << format_double(p.mu.x()) << ','
            << format_double(p.mu.y()) << ',' << format_double(p.statistic) << '\n';
    }
}

}  // namespace delfi
