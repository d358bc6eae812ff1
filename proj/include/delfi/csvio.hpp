#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "delfi/chi2.hpp"
#include "delfi/partition.hpp"

namespace delfi {

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

// Loads part-<id>.csv files (ids contiguous 1..K, uniform n and d, finite
// entries, optional single header line per file).
Cluster parse_partition_dir(const std::filesystem::path& dir);

// part-<id>.csv, one comma-separated row per observation, no header.
void write_partition_dir(const std::filesystem::path& dir, const Cluster& cluster);

// CSV: header method,statistic,df,p_value,alpha,reject,rounds_run,selected_count
void write_test_report_csv(std::ostream& out, const ElTestReport& report);

// Aligned key/value block for terminal output.
std::string render_test_report(const ElTestReport& report);

}  // namespace delfi
