#pragma once

#include <iosfwd>
#include <string>

#include "delfi/datagen.hpp"

namespace delfi {

struct MonteCarloReport {
    struct Row {
        std::string method;
        std::string metric;  // type1 | coverage | power | degenerate
        double value = 0.0;
        double stderr_ = 0.0;
        long reps = 0;
    };
    std::vector<Row> rows;
    ExperimentDesign design;  // resolved design, echoed into the output
    long degenerate = 0;      // repetitions where selection was degenerate
};

// Runs design.repetitions independent replications and tallies the metric per
// method. Degenerate-selection repetitions are reported in their own row,
// never silently dropped.
MonteCarloReport monte_carlo(const ExperimentDesign& design);

struct PowerPoint {
    double shift = 0.0;
    std::string method;
    double power = 0.0;
    double stderr_ = 0.0;
    long reps = 0;
};

// monte_carlo at each shifted truth with H0 fixed at the design's base mean.
std::vector<PowerPoint> power_curve(const ExperimentDesign& design,
                                    const std::vector<double>& shifts);

// CSV: # key = value provenance lines, then method,metric,value,stderr,reps
void write_report_csv(std::ostream& out, const MonteCarloReport& report);

// CSV: provenance lines, then shift,method,power,stderr
void write_power_csv(std::ostream& out, const std::vector<PowerPoint>& points,
                     const ExperimentDesign& design);

}  // namespace delfi
