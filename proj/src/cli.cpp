#include "delfi/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "delfi/config.hpp"
#include "delfi/csvio.hpp"
#include "delfi/montecarlo.hpp"
#include "delfi/region.hpp"

namespace delfi::cli {

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw InvalidConfig("cannot write " + path);
    out << content;
}

struct CommonFlags {
    std::string config;
    std::string data_dir;
    std::string mu0;
    std::string method;
    std::string out;
    std::optional<double> alpha;
    std::optional<double> a;
    std::optional<double> gamma;
    std::optional<int> rounds;
    std::optional<long> seed;

    KvConfig merged() const {
        KvConfig cfg;
        if (!config.empty()) cfg = KvConfig::parse_file(config);
        if (!data_dir.empty()) cfg.set("data_dir", data_dir);
        if (!mu0.empty()) cfg.set("mu0", mu0);
        if (!method.empty()) cfg.set("method", method);
        if (!out.empty()) cfg.set("out", out);
        if (alpha) cfg.set("alpha", format_double(*alpha));
        if (a) cfg.set("a", format_double(*a));
        if (gamma) cfg.set("gamma", format_double(*gamma));
        if (rounds) cfg.set("rounds", std::to_string(*rounds));
        if (seed) cfg.set("seed", std::to_string(*seed));
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "flat key = value configuration file");
    cmd->add_option("--data-dir", flags.data_dir, "directory of part-<id>.csv files");
    cmd->add_option("--mu0", flags.mu0, "hypothesized mean, comma separated");
    cmd->add_option("--method", flags.method, "del or dels");
    cmd->add_option("--alpha", flags.alpha, "significance level");
    cmd->add_option("--a", flags.a, "selection threshold constant");
    cmd->add_option("--gamma", flags.gamma, "explicit selection threshold gamma_n");
    cmd->add_option("--rounds", flags.rounds, "override the round count");
    cmd->add_option("--seed", flags.seed, "generator seed");
    cmd->add_option("--out", flags.out, "output path");
}

enum class Method { Del, DelS };

Method parse_method(const std::string& text) {
    if (text == "del") return Method::Del;
    if (text == "dels" || text == "del_s") return Method::DelS;
    throw InvalidConfig("method must be `del` or `dels`, got `" + text + "`");
}

int cmd_test(const CommonFlags& flags) {
    KvConfig cfg = flags.merged();
    const Cluster cluster = parse_partition_dir(cfg.get_str("data_dir"));
    const int d = static_cast<int>(cluster.front().dim());
    const std::vector<double> mu0_list =
        parse_double_list(cfg.get_str("mu0"), "mu0");
    if (static_cast<int>(mu0_list.size()) != d)
        throw InvalidConfig("mu0 has " + std::to_string(mu0_list.size()) +
                            " entries, data dimension is " + std::to_string(d));
    const Eigen::VectorXd mu0 = to_vector(mu0_list);
    const double alpha = cfg.get_double_or("alpha", 0.05);
    const Method method = parse_method(cfg.get_str_or("method", "del"));
    const int rounds = static_cast<int>(cfg.get_long_or("rounds", 0));
    const std::string out_path = cfg.get_str_or("out", "");
    const double a = cfg.get_double_or("a", 2.0);
    const bool has_gamma = cfg.has("gamma");
    const double gamma = has_gamma ? cfg.get_double("gamma") : 0.0;
    cfg.reject_unknown();

    ElTestReport report;
    std::string audit;
    if (method == Method::Del) {
        DelOptions opts;
        opts.rounds = rounds;
        DelResult res;
        try {
            res = run_del(cluster, mu0, opts);
        } catch (const MaxIterations& e) {
            std::cerr << "error: " << e.what()
                      << "\nhint: heterogeneous machines can keep the surrogate steps from "
                         "converging; try `--method dels` to screen them out\n";
            return kExitError;
        }
        report = decide(res.statistic, d, alpha);
        report.method = ElTestReport::Method::DEL;
        report.rounds_run = res.rounds_run;
        report.selected_count = static_cast<int>(res.participating.size());
    } else {
        DelSOptions opts;
        opts.a = a;
        if (has_gamma) opts.gamma_n = gamma;
        opts.del.rounds = rounds;
        const std::vector<ByzantineBehavior> behaviors(cluster.size());
        DelSResult res = run_del_s(cluster, behaviors, mu0, opts);
        report = decide(res.statistic, d, alpha);
        report.method = ElTestReport::Method::DEL_S;
        report.rounds_run = res.del.rounds_run;
        report.selected_count = static_cast<int>(res.del.participating.size());

        std::ostringstream audit_out;
        audit_out << "gamma_n         " << format_double(res.selection.gamma_n) << '\n';
        audit_out << "excluded       ";
        bool any = false;
        for (const Partition& p : cluster) {
            if (!std::binary_search(res.selection.selected.begin(),
                                    res.selection.selected.end(), p.machine_id)) {
                audit_out << ' ' << p.machine_id;
                any = true;
            }
        }
        if (!any) audit_out << " none";
        audit_out << '\n' << "counts         ";
        for (int s : res.selection.counts) audit_out << ' ' << s;
        audit_out << '\n';
        audit = audit_out.str();
    }

    std::cout << render_test_report(report) << audit;
    if (!out_path.empty()) {
        std::ostringstream csv;
        write_test_report_csv(csv, report);
        write_file(out_path, csv.str());
    }
    return report.reject ? kExitReject : kExitAccept;
}

int cmd_confregion(const CommonFlags& flags, const std::string& levels_text, int angles,
                   const std::string& center_text) {
    KvConfig cfg = flags.merged();
    if (!levels_text.empty()) cfg.set("levels", levels_text);
    if (!center_text.empty()) cfg.set("center", center_text);

    const Cluster cluster = parse_partition_dir(cfg.get_str("data_dir"));
    if (cluster.front().dim() != 2)
        throw InvalidConfig("confidence region tracing needs d = 2 data, got d = " +
                            std::to_string(cluster.front().dim()));
    const Method method = parse_method(cfg.get_str_or("method", "del"));
    const int rounds = static_cast<int>(cfg.get_long_or("rounds", 0));
    const double a = cfg.get_double_or("a", 2.0);
    const bool has_gamma = cfg.has("gamma");
    const double gamma = has_gamma ? cfg.get_double("gamma") : 0.0;
    const std::vector<double> levels =
        parse_double_list(cfg.get_str_or("levels", "0.9,0.95"), "levels");
    const std::string out_prefix = cfg.get_str_or("out", "region");
    const auto center_cfg = cfg.get_vector_opt("center");
    cfg.reject_unknown();

    // the selected subset is a function of the data only, so it is fixed
    // across all boundary evaluations
    Cluster active = cluster;
    if (method == Method::DelS) {
        DelSOptions opts;
        opts.a = a;
        if (has_gamma) opts.gamma_n = gamma;
        const std::vector<ByzantineBehavior> behaviors(cluster.size());
        SelectionGradients collected =
            collect_selection_gradients(cluster, behaviors, SelectionMode::Data);
        const double g =
            has_gamma ? gamma
                      : default_threshold(cluster.front().n(),
                                          static_cast<long>(cluster.size()), a);
        SelectionOutcome sel = select_machines(collected.gradients, g);
        if (2 * static_cast<long>(sel.selected.size()) <= static_cast<long>(cluster.size()))
            throw SelectionDegenerate("selected " + std::to_string(sel.selected.size()) +
                                      " of " + std::to_string(cluster.size()) + " machines");
        Cluster sub;
        for (const Partition& p : cluster)
            if (std::binary_search(sel.selected.begin(), sel.selected.end(), p.machine_id))
                sub.push_back(p);
        active = std::move(sub);
        std::cerr << "selection: " << active.size() << "/" << cluster.size()
                  << " machines, gamma_n = " << format_double(g) << '\n';
    }

    Eigen::Vector2d center;
    if (center_cfg) {
        if (center_cfg->size() != 2) throw InvalidConfig("center needs exactly 2 coordinates");
        center << (*center_cfg)[0], (*center_cfg)[1];
    } else {
        std::vector<Eigen::VectorXd> means;
        means.reserve(active.size());
        for (const Partition& p : active) means.push_back(p.mean());
        const Eigen::VectorXd gm = geometric_median(means);
        center << gm(0), gm(1);
    }

    StatFn statfn = [&](const Eigen::Vector2d& mu) {
        DelOptions opts;
        opts.rounds = rounds;
        return run_del(active, Eigen::VectorXd(mu), opts).statistic;
    };

    TraceOptions trace_opts;
    trace_opts.angles = angles;
    for (double level : levels) {
        RegionTrace trace = trace_region(statfn, center, level, trace_opts);
        std::ostringstream csv;
        write_region_csv(csv, trace);
        const std::string path = out_prefix + "-" + format_double(level) + ".csv";
        write_file(path, csv.str());
        std::cout << "level " << format_double(level) << ": " << trace.boundary.size()
                  << " boundary points -> " << path << '\n';
    }
    return kExitAccept;
}

int cmd_simulate(const CommonFlags& flags, const std::string& metric, long reps) {
    KvConfig cfg = flags.merged();
    if (!metric.empty()) cfg.set("metric", metric);
    if (reps > 0) cfg.set("repetitions", std::to_string(reps));
    const std::string out_path = cfg.get_str_or("out", "");
    cfg.get_str_or("data_dir", "");  // not used here; tolerate shared configs
    ExperimentDesign design = design_from_config(cfg);
    cfg.reject_unknown();

    std::ostringstream csv;
    if (design.metric == McMetric::Power) {
        std::vector<PowerPoint> points = power_curve(design, design.shifts);
        write_power_csv(csv, points, design);
    } else {
        if (design.N > design.central_budget &&
            std::find(design.methods.begin(), design.methods.end(),
                      ElTestReport::Method::EL) != design.methods.end())
            std::cerr << "note: EL skipped, N = " << design.N
                      << " exceeds central_budget = " << design.central_budget << '\n';
        MonteCarloReport report = monte_carlo(design);
        write_report_csv(csv, report);
    }
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        write_file(out_path, csv.str());
        std::cout << "wrote " << out_path << '\n';
    }
    return kExitAccept;
}

int cmd_gen(const CommonFlags& flags, long rep) {
    KvConfig cfg = flags.merged();
    const std::string out_dir = cfg.get_str("out");
    ExperimentDesign design = design_from_config(cfg);
    cfg.reject_unknown();
    auto [cluster, behaviors] = generate_cluster(design, static_cast<std::uint64_t>(rep));
    write_partition_dir(out_dir, cluster);
    std::cout << "wrote " << cluster.size() << " partitions (n = " << design.n()
              << ", d = " << design.d << ") to " << out_dir << '\n';
    return kExitAccept;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"distributed empirical likelihood inference"};
    app.require_subcommand(1);

    CommonFlags test_flags, region_flags, sim_flags, gen_flags;

    CLI::App* test = app.add_subcommand("test", "hypothesis test on partitioned data");
    add_common(test, test_flags);

    CLI::App* region =
        app.add_subcommand("confregion", "trace 2-d confidence region boundaries");
    add_common(region, region_flags);
    std::string levels_text, center_text;
    int angles = 64;
    region->add_option("--levels", levels_text, "comma-separated confidence levels");
    region->add_option("--angles", angles, "number of boundary rays");
    region->add_option("--center", center_text, "trace center, comma separated");

    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo experiment driver");
    add_common(sim, sim_flags);
    std::string metric;
    long reps = 0;
    sim->add_option("--metric", metric, "type1, coverage or power");
    sim->add_option("--reps", reps, "repetition count");

    CLI::App* gen = app.add_subcommand("gen", "materialize a simulated design to CSV files");
    add_common(gen, gen_flags);
    long gen_rep = 0;
    gen->add_option("--rep", gen_rep, "repetition index of the generated cluster");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (test->parsed()) return cmd_test(test_flags);
        if (region->parsed()) return cmd_confregion(region_flags, levels_text, angles, center_text);
        if (sim->parsed()) return cmd_simulate(sim_flags, metric, reps);
        if (gen->parsed()) return cmd_gen(gen_flags, gen_rep);
    } catch (const SelectionDegenerate& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.file << ":" << e.line << ":" << e.column << ": " << e.what()
                  << '\n';
        return kExitError;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.file << ": " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace delfi::cli
