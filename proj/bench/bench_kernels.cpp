#include <ldf/kernels.hpp>
#include <ldf/oracle.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace ldf;

PayoffModel gamma_model() {
    return SingleResourceModel(10.0, {Gamma{12, 0.5}, Gamma{4, 1}, Gamma{10, 0.1}});
}

template <auto Kernel>
void bm_estimate(benchmark::State& state) {
    const auto model = gamma_model();
    for (auto _ : state) {
        auto est = Kernel(model, static_cast<std::size_t>(state.range(0)), 7);
        benchmark::DoNotOptimize(est.mean.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<std::vector<double>> grid_points(std::size_t per_axis) {
    std::vector<std::vector<double>> pts;
    for (std::size_t a = 0; a < per_axis; ++a)
        for (std::size_t b = 0; b < per_axis; ++b)
            for (std::size_t c = 0; c < per_axis; ++c) {
                const double s = 1.0 / static_cast<double>(per_axis);
                pts.push_back({a * s, b * s, c * s});
            }
    return pts;
}

template <auto Kernel>
void bm_classify(benchmark::State& state) {
    const auto table = expected_payoffs(PayoffModel(oracle::gen_monotone_table(3, 11, false)), ExactEstimation{});
    const auto pts = grid_points(static_cast<std::size_t>(state.range(0)));
    GeometryOptions opt;
    opt.first_failure_only = true;
    for (auto _ : state) {
        auto cls = Kernel(table, pts, opt);
        benchmark::DoNotOptimize(cls.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pts.size()));
}

template <auto Kernel>
void bm_replications(benchmark::State& state) {
    const auto model = gamma_model();
    const Policy policy(WldfSpec{WeightVector::ones(3)}, 3);
    const RequirementVector q({0.8, 0.6, 0.4});
    SimConfig cfg;
    cfg.periods = 5000;
    cfg.mode = DeficitMode::signed_;
    for (auto _ : state) {
        auto reps = Kernel(model, policy, q, cfg, static_cast<std::size_t>(state.range(0)));
        benchmark::DoNotOptimize(reps.data());
    }
}

}  // namespace

BENCHMARK(bm_estimate<ldf::kernels::estimate_payoffs_serial>)->Name("estimate_payoffs/serial")->Arg(1 << 16)->UseRealTime();
BENCHMARK(bm_estimate<ldf::kernels::estimate_payoffs_parallel>)->Name("estimate_payoffs/parallel")->Arg(1 << 16)->UseRealTime();
BENCHMARK(bm_classify<ldf::kernels::classify_points_serial>)->Name("classify_points/serial")->Arg(8)->UseRealTime();
BENCHMARK(bm_classify<ldf::kernels::classify_points_parallel>)->Name("classify_points/parallel")->Arg(8)->UseRealTime();
BENCHMARK(bm_replications<ldf::kernels::run_replications_serial>)->Name("replications/serial")->Arg(8)->UseRealTime();
BENCHMARK(bm_replications<ldf::kernels::run_replications_parallel>)->Name("replications/parallel")->Arg(8)->UseRealTime();

BENCHMARK_MAIN();
