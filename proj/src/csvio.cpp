#include "delfi/csvio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <system_error>

namespace delfi {

namespace fs = std::filesystem;

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

// One CSV line of doubles. Returns false when the line is not fully numeric
// (header detection); throws ParseError for NaN/Inf.
bool parse_row(const std::string& line, const std::string& file, int lineno,
               std::vector<double>& out, bool throw_on_bad) {
    out.clear();
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        std::size_t end = comma == std::string::npos ? line.size() : comma;
        std::size_t a = pos;
        while (a < end && (line[a] == ' ' || line[a] == '\t')) ++a;
        std::size_t b = end;
        while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t' || line[b - 1] == '\r')) --b;
        double v = 0.0;
        auto res = std::from_chars(line.data() + a, line.data() + b, v);
        if (res.ec != std::errc() || res.ptr != line.data() + b || a == b) {
            if (throw_on_bad)
                throw ParseError("cannot parse numeric field", file, lineno,
                                 static_cast<int>(a) + 1);
            return false;
        }
        if (!std::isfinite(v)) {
            if (throw_on_bad)
                throw ParseError("non-finite value", file, lineno, static_cast<int>(a) + 1);
            return false;
        }
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return true;
}

Partition parse_partition_file(const fs::path& path, int machine_id) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open " + path.string());
    const std::string fname = path.string();

    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = line;
        if (!trimmed.empty() && trimmed.back() == '\r') trimmed.pop_back();
        if (trimmed.empty()) continue;
        std::vector<double> row;
        if (first_content) {
            // only the first line may be a header
            if (!parse_row(trimmed, fname, lineno, row, false)) {
                first_content = false;
                continue;
            }
            first_content = false;
        } else {
            parse_row(trimmed, fname, lineno, row, true);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("row has " + std::to_string(row.size()) + " fields, expected " +
                                 std::to_string(rows.front().size()),
                             fname, lineno, 1);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("no data rows", fname, lineno, 1);

    Partition part;
    part.machine_id = machine_id;
    part.rows.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (std::size_t a = 0; a < rows[j].size(); ++a)
            part.rows(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(a)) = rows[j][a];
    return part;
}

}  // namespace

Cluster parse_partition_dir(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw InvalidConfig("not a directory: " + dir.string());
    std::map<int, fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("part-", 0) != 0 || entry.path().extension() != ".csv") continue;
        const std::string id_text = name.substr(5, name.size() - 5 - 4);
        int id = 0;
        auto res = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
        if (res.ec != std::errc() || res.ptr != id_text.data() + id_text.size() || id < 1)
            throw InvalidConfig("bad partition file name: " + name);
        if (!files.emplace(id, entry.path()).second)
            throw InvalidConfig("duplicate partition id in " + name);
    }
    if (files.empty()) throw InvalidConfig("no part-<id>.csv files in " + dir.string());
    int expect = 1;
    for (const auto& [id, path] : files) {
        if (id != expect)
            throw InvalidConfig("partition ids are not contiguous: missing part-" +
                                std::to_string(expect) + ".csv");
        ++expect;
    }

    Cluster cluster;
    cluster.reserve(files.size());
    for (const auto& [id, path] : files) cluster.push_back(parse_partition_file(path, id));

    const Eigen::Index n = cluster.front().n();
    const Eigen::Index d = cluster.front().dim();
    for (std::size_t i = 1; i < cluster.size(); ++i) {
        if (cluster[i].dim() != d)
            throw DimensionMismatch("column count differs from part-1.csv",
                                    files.at(static_cast<int>(i) + 1).string());
        if (cluster[i].n() != n)
            throw DimensionMismatch("row count differs from part-1.csv (equal per-machine "
                                    "sample sizes are required)",
                                    files.at(static_cast<int>(i) + 1).string());
    }
    return cluster;
}

void write_partition_dir(const fs::path& dir, const Cluster& cluster) {
    validate_cluster(cluster);
    fs::create_directories(dir);
    for (const Partition& part : cluster) {
        const fs::path path = dir / ("part-" + std::to_string(part.machine_id) + ".csv");
        std::ofstream out(path);
        if (!out) throw InvalidConfig("cannot write " + path.string());
        for (Eigen::Index j = 0; j < part.n(); ++j) {
            for (Eigen::Index a = 0; a < part.dim(); ++a) {
                if (a) out << ',';
                out << format_double(part.rows(j, a));
            }
            out << '\n';
        }
    }
}

void write_test_report_csv(std::ostream& out, const ElTestReport& report) {
    out << "method,statistic,df,p_value,alpha,reject,rounds_run,selected_count\n";
    out << method_name(report.method) << ',' << format_double(report.statistic) << ','
        << report.df << ',' << format_double(report.p_value) << ','
        << format_double(report.alpha) << ',' << (report.reject ? 1 : 0) << ','
        << report.rounds_run << ',' << report.selected_count << '\n';
}

std::string render_test_report(const ElTestReport& report) {
    std::ostringstream out;
    auto row = [&](const char* key, const std::string& value) {
        out << key;
        for (std::size_t i = std::char_traits<char>::length(key); i < 16; ++i) out << ' ';
        out << value << '\n';
    };
    row("method", method_name(report.method));
    row("statistic", format_double(report.statistic));
    row("df", std::to_string(report.df));
    row("p-value", format_double(report.p_value));
    row("alpha", format_double(report.alpha));
    row("decision", report.reject ? "reject" : "accept");
    row("rounds run", std::to_string(report.rounds_run));
    if (report.method == ElTestReport::Method::DEL_S)
        row("selected", std::to_string(report.selected_count));
    return out.str();
}

}  // namespace delfi
