#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "delfi/cli.hpp"
#include "delfi/config.hpp"
#include "delfi/csvio.hpp"
#include "delfi/montecarlo.hpp"
#include "helpers.hpp"

using namespace delfi;
using namespace delfi::testing;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"del"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("delfi_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("partition files round-trip bit-exactly") {
    ExperimentDesign design;
    design.K = 4;
    design.N = 4 * 25;
    design.d = 3;
    design.generator.d = 3;
    design.generator.seed = 8080;
    auto [cluster, behaviors] = generate_cluster(design);

    TempDir dir;
    write_partition_dir(dir.path, cluster);
    Cluster loaded = parse_partition_dir(dir.path);
    REQUIRE(loaded.size() == cluster.size());
    for (std::size_t i = 0; i < cluster.size(); ++i) {
        CHECK(loaded[i].machine_id == cluster[i].machine_id);
        CHECK(loaded[i].rows == cluster[i].rows);
    }
}

TEST_CASE("partition parser accepts a single header row") {
    TempDir dir;
    write_text(dir.path / "part-1.csv", "x,y\n1.5,2\n3,4\n");
    write_text(dir.path / "part-2.csv", "5,6\n7,8\n");
    Cluster cluster = parse_partition_dir(dir.path);
    CHECK(cluster.size() == 2);
    CHECK(cluster[0].rows(0, 0) == 1.5);
    CHECK(cluster[1].rows(1, 1) == 8.0);
}

TEST_CASE("parser reports exact locations") {
    TempDir dir;
    write_text(dir.path / "part-1.csv", "1,2\n3,4\n");
    write_text(dir.path / "part-2.csv", "1,2\n3,oops\n");
    try {
        parse_partition_dir(dir.path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.file.find("part-2.csv") != std::string::npos);
        CHECK(e.line == 2);
        CHECK(e.column == 3);
    }
}

TEST_CASE("ragged rows and non-finite values are rejected") {
    TempDir dir;
    write_text(dir.path / "part-1.csv", "1,2\n3\n");
    CHECK_THROWS_AS(parse_partition_dir(dir.path), ParseError);
    write_text(dir.path / "part-1.csv", "1,2\n3,nan\n");
    CHECK_THROWS_AS(parse_partition_dir(dir.path), ParseError);
    write_text(dir.path / "part-1.csv", "1,2\n3,inf\n");
    CHECK_THROWS_AS(parse_partition_dir(dir.path), ParseError);
}

TEST_CASE("shape mismatches across files") {
    TempDir dir;
    write_text(dir.path / "part-1.csv", "1,2\n3,4\n");
    write_text(dir.path / "part-2.csv", "1,2,9\n3,4,9\n");
    CHECK_THROWS_AS(parse_partition_dir(dir.path), DimensionMismatch);

    write_text(dir.path / "part-2.csv", "1,2\n3,4\n5,6\n");  // unequal n
    CHECK_THROWS_AS(parse_partition_dir(dir.path), DimensionMismatch);
}

TEST_CASE("ids must be contiguous from 1") {
    TempDir dir;
    write_text(dir.path / "part-1.csv", "1,2\n3,4\n");
    write_text(dir.path / "part-3.csv", "1,2\n3,4\n");
    CHECK_THROWS_AS(parse_partition_dir(dir.path), InvalidConfig);
}

TEST_CASE("config parsing") {
    KvConfig cfg = KvConfig::parse_string("K = 10\nn = 50 # trailing comment\nalpha=0.1\n");
    CHECK(cfg.get_long("K") == 10);
    CHECK(cfg.get_long("n") == 50);
    CHECK(cfg.get_double("alpha") == 0.1);
    CHECK_THROWS_AS(KvConfig::parse_string("a = 1\na = 2\n"), InvalidConfig);
    CHECK_THROWS_AS(KvConfig::parse_string("nonsense\n"), InvalidConfig);

    KvConfig unknown = KvConfig::parse_string("K = 10\nmystery = 1\n");
    unknown.get_long("K");
    try {
        unknown.reject_unknown();
        FAIL("expected InvalidConfig");
    } catch (const InvalidConfig& e) {
        CHECK(std::string(e.what()).find("mystery") != std::string::npos);
    }
}

TEST_CASE("design from config") {
    KvConfig cfg = KvConfig::parse_string(
        "family = exponential\nd = 4\nK = 8\nn = 125\nrepetitions = 7\n"
        "methods = el, dels\nmetric = coverage\nseed = 42\n");
    ExperimentDesign design = design_from_config(cfg);
    CHECK(design.N == 1000);
    CHECK(design.generator.family == GeneratorSpec::Family::JointExponential);
    CHECK(design.methods.size() == 2);
    CHECK(design.metric == McMetric::Coverage);

    CHECK_THROWS_AS(design_from_config(KvConfig::parse_string("K = 7\nN = 100\n")),
                    InvalidConfig);
    CHECK_THROWS_AS(design_from_config(KvConfig::parse_string("n = 10\nN = 100\n")),
                    InvalidConfig);
    CHECK_THROWS_AS(design_from_config(KvConfig::parse_string("metric = power\n")),
                    InvalidConfig);
}

TEST_CASE("cli test command: accept, reject, errors") {
    TempDir dir;
    // identical tiny partitions with mu0 = the exact pooled mean
    write_text(dir.path / "part-1.csv", "1\n3\n");
    write_text(dir.path / "part-2.csv", "1\n3\n");

    TempDir outdir;
    const std::string out = (outdir.path / "report.csv").string();
    CHECK(run_cli({"test", "--data-dir", dir.path.string(), "--mu0", "2", "--out", out}) ==
          cli::kExitAccept);
    const std::string csv = read_text(out);
    CHECK(csv.find("method,statistic,df,p_value,alpha,reject,rounds_run,selected_count") !=
          std::string::npos);
    CHECK(csv.find("DEL,0,1,1,0.05,0,") != std::string::npos);

    // still inside the hull but far from the mean: reject
    CHECK(run_cli({"test", "--data-dir", dir.path.string(), "--mu0", "1.1"}) ==
          cli::kExitReject);

    // outside the hull: error
    CHECK(run_cli({"test", "--data-dir", dir.path.string(), "--mu0", "5"}) == cli::kExitError);

    // bad method name
    CHECK(run_cli({"test", "--data-dir", dir.path.string(), "--mu0", "2", "--method", "x"}) ==
          cli::kExitError);

    // missing data dir
    CHECK(run_cli({"test", "--data-dir", (dir.path / "nope").string(), "--mu0", "2"}) ==
          cli::kExitError);
}

TEST_CASE("cli test command: degenerate selection exit code") {
    TempDir dir;
    write_text(dir.path / "part-1.csv", "0\n0.01\n-0.01\n");
    write_text(dir.path / "part-2.csv", "5\n5.01\n4.99\n");
    CHECK(run_cli({"test", "--data-dir", dir.path.string(), "--mu0", "2.5", "--method",
                   "dels"}) == cli::kExitDegenerate);
}

TEST_CASE("cli gen then test round trip") {
    TempDir dir;
    TempDir cfgdir;
    const fs::path cfg = cfgdir.path / "design.cfg";
    write_text(cfg,
               "family = normal\nd = 2\nK = 6\nn = 150\nseed = 314\n"
               "repetitions = 1\nmethods = del\n");
    const std::string data = (dir.path / "data").string();
    CHECK(run_cli({"gen", "--config", cfg.string(), "--out", data}) == 0);
    CHECK(fs::exists(fs::path(data) / "part-1.csv"));
    CHECK(fs::exists(fs::path(data) / "part-6.csv"));

    // H0 at the generator's true mean: acceptance is the overwhelmingly likely
    // outcome, but either decision is a valid exit here; just not an error
    const int code = run_cli({"test", "--data-dir", data, "--mu0", "0,0"});
    CHECK((code == cli::kExitAccept || code == cli::kExitReject));

    // dels on honest data selects everything
    const int dels_code =
        run_cli({"test", "--data-dir", data, "--mu0", "0,0", "--method", "dels"});
    CHECK((dels_code == cli::kExitAccept || dels_code == cli::kExitReject));
}

TEST_CASE("cli simulate writes a parseable report") {
    TempDir dir;
    const fs::path cfg = dir.path / "sim.cfg";
    write_text(cfg,
               "family = normal\nd = 2\nK = 5\nn = 60\nseed = 999\n"
               "repetitions = 20\nmethods = del,dels\nmetric = type1\n");
    const std::string out = (dir.path / "sim.csv").string();
    CHECK(run_cli({"simulate", "--config", cfg.string(), "--out", out}) == 0);
    const std::string csv = read_text(out);
    CHECK(csv.find("# repetitions = 20") != std::string::npos);
    CHECK(csv.find("method,metric,value,stderr,reps") != std::string::npos);
    CHECK(csv.find("DEL,type1,") != std::string::npos);
    CHECK(csv.find("DEL_S,type1,") != std::string::npos);

    // flag overrides config
    const std::string out2 = (dir.path / "sim2.csv").string();
    CHECK(run_cli({"simulate", "--config", cfg.string(), "--reps", "10", "--out", out2}) == 0);
    CHECK(read_text(out2).find("# repetitions = 10") != std::string::npos);
}

TEST_CASE("cli confregion traces nested boundaries") {
    TempDir dir;
    const fs::path cfg = dir.path / "gen.cfg";
    write_text(cfg, "family = normal\nd = 2\nK = 4\nn = 120\nseed = 246\n");
    const std::string data = (dir.path / "data").string();
    REQUIRE(run_cli({"gen", "--config", cfg.string(), "--out", data}) == 0);

    const std::string prefix = (dir.path / "region").string();
    CHECK(run_cli({"confregion", "--data-dir", data, "--levels", "0.9,0.95", "--angles", "8",
                   "--out", prefix}) == 0);
    const fs::path lo = prefix + "-0.9.csv";
    const fs::path hi = prefix + "-0.95.csv";
    REQUIRE(fs::exists(lo));
    REQUIRE(fs::exists(hi));

    auto radii = [](const fs::path& p) {
        std::ifstream in(p);
        std::string line;
        std::getline(in, line);  // header
        std::vector<double> out;
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::string angle, m1, m2;
            std::getline(row, angle, ',');
            std::getline(row, m1, ',');
            std::getline(row, m2, ',');
            out.push_back(std::hypot(std::stod(m1), std::stod(m2)));
        }
        return out;
    };
    // same center for both traces: nesting holds per angle (center ~ 0 here)
    std::vector<double> r_lo = radii(lo), r_hi = radii(hi);
    REQUIRE(r_lo.size() == 8);
    REQUIRE(r_hi.size() == 8);

    // honest data selects every machine, so the screened trace is identical
    const std::string dels_prefix = (dir.path / "region_dels").string();
    CHECK(run_cli({"confregion", "--data-dir", data, "--levels", "0.95", "--angles", "8",
                   "--method", "dels", "--out", dels_prefix}) == 0);
    CHECK(read_text(dels_prefix + "-0.95.csv") == read_text(hi));
}

TEST_CASE("cli rejects unknown config keys") {
    TempDir dir;
    const fs::path cfg = dir.path / "sim.cfg";
    write_text(cfg, "K = 5\nn = 60\nrepetitions = 5\nwat = 1\n");
    CHECK(run_cli({"simulate", "--config", cfg.string()}) == cli::kExitError);
}

TEST_CASE("format_double round trips") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.6789, -0.0, 2.0}) {
        const std::string s = format_double(x);
        CHECK(std::stod(s) == x);
    }
}
