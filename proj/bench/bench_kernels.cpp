// Compares the blocked OpenMP dual kernels against the serial reference and
// times one protocol round at a few cluster shapes.
#include <benchmark/benchmark.h>

#include "delfi/datagen.hpp"
#include "delfi/parallel.hpp"
#include "delfi/protocol.hpp"
#include "delfi/reference.hpp"

namespace {

delfi::Partition make_partition(Eigen::Index n, int d) {
    delfi::SubstreamRng stream(42, 1, 0);
    delfi::Partition part;
    part.machine_id = 1;
    part.rows = delfi::normal_draw(d, 0.5, n, stream);
    return part;
}

void bm_dual_eval_serial(benchmark::State& state) {
    const auto part = make_partition(state.range(0), 15);
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(15);
    const Eigen::VectorXd lam = Eigen::VectorXd::Constant(15, 1e-3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(delfi::reference::dual_value(part, mu, lam));
        benchmark::DoNotOptimize(delfi::reference::dual_gradient(part, mu, lam));
        benchmark::DoNotOptimize(delfi::reference::dual_hessian(part, mu, lam));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_dual_eval_blocked(benchmark::State& state) {
    const auto part = make_partition(state.range(0), 15);
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(15);
    const Eigen::VectorXd lam = Eigen::VectorXd::Constant(15, 1e-3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(delfi::dual_eval(part, mu, lam, true));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_del_round(benchmark::State& state) {
    delfi::ExperimentDesign design;
    design.K = static_cast<int>(state.range(0));
    design.N = design.K * 400;
    design.d = 5;
    design.generator.d = 5;
    design.generator.seed = 7;
    design.repetitions = 1;
    auto [cluster, behaviors] = delfi::generate_cluster(design);
    const Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(5);
    delfi::DelOptions opts;
    opts.rounds = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(delfi::run_del(cluster, mu0, opts));
    }
}

}  // namespace

BENCHMARK(bm_dual_eval_serial)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bm_dual_eval_blocked)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bm_del_round)->Arg(10)->Arg(50)->Arg(250);

BENCHMARK_MAIN();
