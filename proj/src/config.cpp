#include "delfi/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace delfi {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

KvConfig KvConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path.string());
}

KvConfig KvConfig::parse_string(const std::string& text, const std::string& origin) {
    KvConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string entry = trim(line);
        if (entry.empty()) continue;
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig(origin + ":" + std::to_string(lineno) +
                                ": expected `key = value`");
        const std::string key = trim(entry.substr(0, eq));
        const std::string value = trim(entry.substr(eq + 1));
        if (key.empty())
            throw InvalidConfig(origin + ":" + std::to_string(lineno) + ": empty key");
        if (!cfg.values_.emplace(key, value).second)
            throw InvalidConfig(origin + ":" + std::to_string(lineno) + ": duplicate key `" +
                                key + "`");
    }
    return cfg;
}

void KvConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

bool KvConfig::has(const std::string& key) const {
    consumed_.insert(key);
    return values_.count(key) != 0;
}

std::string KvConfig::get_str(const std::string& key) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) throw InvalidConfig("missing config key `" + key + "`");
    return it->second;
}

std::string KvConfig::get_str_or(const std::string& key, const std::string& fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

long KvConfig::get_long(const std::string& key) const {
    const std::string s = get_str(key);
    long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw InvalidConfig("config key `" + key + "`: not an integer: " + s);
    return v;
}

long KvConfig::get_long_or(const std::string& key, long fallback) const {
    return has(key) ? get_long(key) : fallback;
}

double KvConfig::get_double(const std::string& key) const {
    const std::string s = get_str(key);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw InvalidConfig("config key `" + key + "`: not a finite number: " + s);
    return v;
}

double KvConfig::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::vector<double> KvConfig::get_vector(const std::string& key) const {
    return parse_double_list(get_str(key), "config key `" + key + "`");
}

std::optional<std::vector<double>> KvConfig::get_vector_opt(const std::string& key) const {
    if (!has(key)) return {};
    return get_vector(key);
}

void KvConfig::reject_unknown() const {
    for (const auto& [key, value] : values_) {
        if (!consumed_.count(key))
            throw InvalidConfig((origin_.empty() ? std::string("config") : origin_) +
                                ": unknown key `" + key + "`");
    }
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::size_t end = comma == std::string::npos ? text.size() : comma;
        std::string field = trim(text.substr(pos, end - pos));
        if (field.empty()) throw InvalidConfig(what + ": empty field in list");
        double v = 0.0;
        auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc() || res.ptr != field.data() + field.size() ||
            !std::isfinite(v))
            throw InvalidConfig(what + ": not a finite number: " + field);
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw InvalidConfig(what + ": empty list");
    return out;
}

ExperimentDesign design_from_config(const KvConfig& cfg) {
    ExperimentDesign design;

    const std::string family = cfg.get_str_or("family", "normal");
    if (family == "normal") {
        design.generator.family = GeneratorSpec::Family::EquicorrelatedNormal;
    } else if (family == "exponential") {
        design.generator.family = GeneratorSpec::Family::JointExponential;
    } else {
        throw InvalidConfig("family must be `normal` or `exponential`, got `" + family + "`");
    }

    design.d = static_cast<int>(cfg.get_long_or("d", 5));
    design.K = static_cast<int>(cfg.get_long_or("K", 50));
    if (cfg.has("n") && cfg.has("N")) throw InvalidConfig("give either n or N, not both");
    if (cfg.has("n")) {
        design.N = cfg.get_long("n") * design.K;
    } else {
        design.N = cfg.get_long_or("N", 10000);
    }
    design.generator.d = design.d;
    design.generator.rho = cfg.get_double_or("rho", 0.5);
    design.generator.decay = cfg.get_double_or("decay", 0.5);
    design.generator.seed = static_cast<std::uint64_t>(cfg.get_long_or("seed", 1));
    design.n_byzantine = static_cast<int>(cfg.get_long_or("n_byzantine", 0));
    design.delta_b = cfg.get_double_or("delta_b", 0.3);

    const std::string mode = cfg.get_str_or("byz_mode", "mean-shift");
    if (mode == "mean-shift") {
        design.byz_mode = ByzMode::MeanShift;
    } else if (mode == "gradient-tamper") {
        design.byz_mode = ByzMode::GradientTamper;
    } else {
        throw InvalidConfig("byz_mode must be `mean-shift` or `gradient-tamper`");
    }

    design.alpha = cfg.get_double_or("alpha", 0.05);
    design.level = cfg.get_double_or("level", 0.90);
    design.repetitions = static_cast<int>(cfg.get_long_or("repetitions", 1000));
    design.a = cfg.get_double_or("a", 2.0);
    design.rounds = static_cast<int>(cfg.get_long_or("rounds", 0));
    design.central_budget = cfg.get_long_or("central_budget", 200000);

    const std::string metric = cfg.get_str_or("metric", "type1");
    if (metric == "type1") {
        design.metric = McMetric::TypeI;
    } else if (metric == "coverage") {
        design.metric = McMetric::Coverage;
    } else if (metric == "power") {
        design.metric = McMetric::Power;
    } else {
        throw InvalidConfig("metric must be type1, coverage or power");
    }
    if (auto shifts = cfg.get_vector_opt("shifts")) design.shifts = *shifts;
    if (design.metric == McMetric::Power && design.shifts.empty())
        throw InvalidConfig("power metric needs a `shifts` list");

    design.methods.clear();
    std::string methods = cfg.get_str_or("methods", "del");
    std::transform(methods.begin(), methods.end(), methods.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    std::istringstream ms(methods);
    std::string tok;
    while (std::getline(ms, tok, ',')) {
        tok = trim(tok);
        if (tok == "el") {
            design.methods.push_back(ElTestReport::Method::EL);
        } else if (tok == "del") {
            design.methods.push_back(ElTestReport::Method::DEL);
        } else if (tok == "dels" || tok == "del_s") {
            design.methods.push_back(ElTestReport::Method::DEL_S);
        } else if (!tok.empty()) {
            throw InvalidConfig("unknown method `" + tok + "` (el, del, dels)");
        }
    }

    if (auto mu0 = cfg.get_vector_opt("mu0")) {
        design.mu0 = Eigen::Map<const Eigen::VectorXd>(mu0->data(),
                                                       static_cast<Eigen::Index>(mu0->size()));
    }
    design.validate();
    return design;
}

}  // namespace delfi
