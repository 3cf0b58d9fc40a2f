// Serial reference vs OpenMP sweeps on the three parallel kernels.
#include <benchmark/benchmark.h>

#include "seo/circle_map.hpp"
#include "seo/full_dynamics.hpp"
#include "seo/spectral.hpp"
#include "seo/stats.hpp"
#include "verify/devices.hpp"

namespace {

seo::ExecPolicy policy_of(const benchmark::State& st) {
    return st.range(0) == 0 ? seo::ExecPolicy::Serial : seo::ExecPolicy::Parallel;
}

void label(benchmark::State& st) { st.SetLabel(st.range(0) == 0 ? "serial" : "parallel"); }

void BM_WindingStaircase(benchmark::State& st) {
    seo::MapSpec spec;
    spec.w_a = 0.9;
    const auto alphas = seo::stats::linspace(-3.0, 3.0, 256);
    for (auto _ : st) {
        auto rows = seo::winding_staircase(spec, alphas, 0.0, 1000, 5000, policy_of(st));
        benchmark::DoNotOptimize(rows.data());
    }
    label(st);
}

void BM_LockStaircase(benchmark::State& st) {
    const auto dev = seo::verify::plateau_device();
    seo::LockSweepConfig cfg;
    cfg.duration = 4000.0;
    cfg.dt = 0.05;
    cfg.init = dev.equilibrium;
    cfg.init.x += 1e-3;
    const seo::DriveProgram drive{dev.p0, 0.03, 1.0};
    const auto grid = seo::stats::linspace(0.99, 1.02, 16);
    for (auto _ : st) {
        auto rows = seo::lock_staircase(dev.cav, dev.tm, drive, grid, 1, 1, cfg, policy_of(st));
        benchmark::DoNotOptimize(rows.data());
    }
    label(st);
}

void BM_SweepSpectrogram(benchmark::State& st) {
    seo::AdlerSource src;
    src.omega_eff = 1000.0;
    src.omega_a = 1.0;
    seo::WelchConfig welch;
    welch.segment_len = 2048;
    welch.segments = 8;
    const auto grid = seo::stats::linspace(-2e-3, 2e-3, 16);
    for (auto _ : st) {
        auto res = seo::sweep_spectrogram(src, grid, welch, 7, policy_of(st));
        benchmark::DoNotOptimize(res.rows.data());
    }
    label(st);
}

}  // namespace

BENCHMARK(BM_WindingStaircase)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LockStaircase)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSpectrogram)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
