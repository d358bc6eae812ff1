#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "delfi/datagen.hpp"

namespace delfi {

// Flat `key = value` configuration. `#` starts a comment, duplicate keys are
// rejected, and unknown keys are reported after the consumer has pulled
// everything it understands.
class KvConfig {
public:
    KvConfig() = default;
    static KvConfig parse_file(const std::filesystem::path& path);
    static KvConfig parse_string(const std::string& text, const std::string& origin = "<string>");

    void set(const std::string& key, const std::string& value);  // CLI override
    bool has(const std::string& key) const;

    std::string get_str(const std::string& key) const;
    std::string get_str_or(const std::string& key, const std::string& fallback) const;
    long get_long(const std::string& key) const;
    long get_long_or(const std::string& key, long fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    std::vector<double> get_vector(const std::string& key) const;
    std::optional<std::vector<double>> get_vector_opt(const std::string& key) const;

    // Throws InvalidConfig naming the first key nobody consumed.
    void reject_unknown() const;

private:
    std::string origin_;
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

// Builds the simulation design from config keys (family, d, K, n or N, rho,
// decay, delta_b, n_byzantine, byz_mode, alpha, level, repetitions, methods,
// metric, shifts, seed, a, rounds, central_budget, mu0).
ExperimentDesign design_from_config(const KvConfig& cfg);

std::vector<double> parse_double_list(const std::string& text, const std::string& what);

}  // namespace delfi
