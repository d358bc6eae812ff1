#include "delfi/montecarlo.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "delfi/csvio.hpp"
#include "delfi/parallel.hpp"

namespace delfi {

namespace {

constexpr std::uint8_t kSkipped = 2;  // degenerate selection, no decision

double binomial_se(double p, long n) {
    return n > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
}

const char* family_name(GeneratorSpec::Family f) {
    return f == GeneratorSpec::Family::EquicorrelatedNormal ? "normal" : "exponential";
}

const char* metric_name(McMetric m) {
    switch (m) {
        case McMetric::TypeI: return "type1";
        case McMetric::Coverage: return "coverage";
        case McMetric::Power: return "power";
    }
    return "?";
}

void echo_design(std::ostream& out, const ExperimentDesign& d) {
    out << "# family = " << family_name(d.generator.family) << '\n';
    out << "# N = " << d.N << '\n';
    out << "# K = " << d.K << '\n';
    out << "# n = " << d.n() << '\n';
    out << "# d = " << d.d << '\n';
    if (d.generator.family == GeneratorSpec::Family::EquicorrelatedNormal)
        out << "# rho = " << format_double(d.generator.rho) << '\n';
    else
        out << "# decay = " << format_double(d.generator.decay) << '\n';
    out << "# n_byzantine = " << d.n_byzantine << '\n';
    out << "# delta_b = " << format_double(d.delta_b) << '\n';
    out << "# byz_mode = "
        << (d.byz_mode == ByzMode::MeanShift ? "mean-shift" : "gradient-tamper") << '\n';
    out << "# alpha = " << format_double(d.alpha) << '\n';
    out << "# level = " << format_double(d.level) << '\n';
    out << "# repetitions = " << d.repetitions << '\n';
    out << "# seed = " << d.generator.seed << '\n';
    out << "# a = " << format_double(d.a) << '\n';
    out << "# rounds = " << d.rounds << '\n';
    out << "# metric = " << metric_name(d.metric) << '\n';
    out << "# methods =";
    for (auto m : d.methods) out << ' ' << method_name(m);
    out << '\n';
}

struct RepOutcome {
    std::uint8_t el = kSkipped;
    std::uint8_t del = kSkipped;
    std::uint8_t dels = kSkipped;
    bool degenerate = false;
};

}  // namespace

MonteCarloReport monte_carlo(const ExperimentDesign& design) {
    design.validate();
    const Eigen::VectorXd mu0 = design.hypothesis();
    const double alpha =
        design.metric == McMetric::Coverage ? 1.0 - design.level : design.alpha;

    bool want_el = false, want_del = false, want_dels = false;
    for (auto m : design.methods) {
        want_el |= m == ElTestReport::Method::EL;
        want_del |= m == ElTestReport::Method::DEL;
        want_dels |= m == ElTestReport::Method::DEL_S;
    }
    const bool el_fits = design.N <= design.central_budget;

    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(design.repetitions));
    parallel_for_indexed(design.repetitions, [&](std::ptrdiff_t rep) {
        auto [cluster, behaviors] = generate_cluster(design, static_cast<std::uint64_t>(rep));
        RepOutcome& out = outcomes[static_cast<std::size_t>(rep)];

        GradientTamper tamper;
        if (design.byz_mode == ByzMode::GradientTamper && design.n_byzantine > 0) {
            const int first_byz = design.K - design.n_byzantine + 1;
            const Eigen::VectorXd bias = Eigen::VectorXd::Constant(design.d, design.delta_b);
            tamper = [first_byz, bias](int machine_id, const Eigen::VectorXd& g) {
                return machine_id >= first_byz ? Eigen::VectorXd(g + bias) : g;
            };
        }

        if (want_el && el_fits) {
            Partition pooled = pool(cluster);
            SolveOutcome solved = shifted_minimize(pooled, mu0, Eigen::VectorXd::Zero(design.d),
                                                   Eigen::VectorXd::Zero(design.d));
            const double stat = elr_contribution(pooled, mu0, solved.lambda);
            out.el = decide(stat, design.d, alpha).reject ? 1 : 0;
        }
        if (want_del) {
            DelOptions opts;
            opts.rounds = design.rounds;
            opts.tamper = tamper;
            DelResult del = run_del(cluster, mu0, opts);
            out.del = decide(del.statistic, design.d, alpha).reject ? 1 : 0;
        }
        if (want_dels) {
            DelSOptions opts;
            opts.a = design.a;
            opts.mode = design.byz_mode == ByzMode::GradientTamper
                            ? SelectionMode::ReceivedGradient
                            : SelectionMode::Data;
            opts.del.rounds = design.rounds;
            try {
                DelSResult dels = run_del_s(cluster, behaviors, mu0, opts);
                out.dels = decide(dels.statistic, design.d, alpha).reject ? 1 : 0;
            } catch (const SelectionDegenerate&) {
                out.degenerate = true;
            }
        }
    });

    MonteCarloReport report;
    report.design = design;
    const long reps = design.repetitions;

    auto tally = [&](const char* name, auto member) {
        long rejected = 0;
        long valid = 0;
        for (const RepOutcome& o : outcomes) {
            const std::uint8_t v = o.*member;
            if (v == kSkipped) continue;
            ++valid;
            rejected += v;
        }
        if (valid == 0) return;
        double rate = static_cast<double>(rejected) / static_cast<double>(valid);
        if (design.metric == McMetric::Coverage) rate = 1.0 - rate;
        report.rows.push_back(
            {name, metric_name(design.metric), rate, binomial_se(rate, valid), valid});
    };
    if (want_el && el_fits) tally("EL", &RepOutcome::el);
    if (want_del) tally("DEL", &RepOutcome::del);
    if (want_dels) tally("DEL_S", &RepOutcome::dels);

    for (const RepOutcome& o : outcomes) report.degenerate += o.degenerate ? 1 : 0;
    if (want_dels && report.degenerate > 0) {
        const double rate = static_cast<double>(report.degenerate) / static_cast<double>(reps);
        report.rows.push_back({"DEL_S", "degenerate", rate, binomial_se(rate, reps), reps});
    }
    return report;
}

std::vector<PowerPoint> power_curve(const ExperimentDesign& design,
                                    const std::vector<double>& shifts) {
    design.validate();
    std::vector<PowerPoint> points;
    for (double shift : shifts) {
        if (!std::isfinite(shift)) throw InvalidConfig("power shift must be finite");
        ExperimentDesign shifted = design;
        shifted.metric = McMetric::TypeI;  // rejection rate at the shifted truth
        if (design.generator.family == GeneratorSpec::Family::EquicorrelatedNormal)
            shifted.generator.mean_shift = Eigen::VectorXd::Constant(design.d, shift);
        else
            shifted.generator.rate_shift = shift;
        shifted.mu0 = design.hypothesis();  // H0 stays at the unshifted mean
        MonteCarloReport report = monte_carlo(shifted);
        for (const auto& row : report.rows) {
            if (row.metric == std::string("degenerate")) continue;
            points.push_back({shift, row.method, row.value, row.stderr_, row.reps});
        }
    }
    return points;
}

void write_report_csv(std::ostream& out, const MonteCarloReport& report) {
    echo_design(out, report.design);
    out << "method,metric,value,stderr,reps\n";
    for (const auto& row : report.rows) {
        out << row.method << ',' << row.metric << ',' << format_double(row.value) << ','
            << format_double(row.stderr_) << ',' << row.reps << '\n';
    }
}

void write_power_csv(std::ostream& out, const std::vector<PowerPoint>& points,
                     const ExperimentDesign& design) {
    echo_design(out, design);
    out << "shift,method,power,stderr\n";
    for (const auto& p : points) {
        out << format_double(p.shift) << ',' << p.method << ',' << format_double(p.power)
            << ',' << format_double(p.stderr_) << '\n';
    }
}

}  // namespace delfi
