// Compares the OpenMP kernels against their serial references across
// grid sizes. Both variants share the blocked reduction layout, so the
// numbers differ only in scheduling overhead and core count.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "divrate/kernels.hpp"

namespace {

struct Profiles {
    std::vector<double> n, g, B, out;
};

Profiles make_profiles(std::size_t size) {
    Profiles p;
    p.n.resize(size);
    p.g.assign(size, 1.0);
    p.B.resize(size);
    p.out.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(size) * 8.0;
        p.n[i] = x * std::exp(-x);
        p.B[i] = 2.0 * x * x / (1.0 + x * x);
    }
    return p;
}

void bm_generator_rhs_serial(benchmark::State& state) {
    auto p = make_profiles(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        divrate::kernels::generator_rhs_serial(p.n, p.g, p.B, 1e-3, p.out);
        benchmark::DoNotOptimize(p.out.data());
    }
}

void bm_generator_rhs_omp(benchmark::State& state) {
    auto p = make_profiles(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        divrate::kernels::generator_rhs_omp(p.n, p.g, p.B, 1e-3, p.out);
        benchmark::DoNotOptimize(p.out.data());
    }
}

void bm_euler_step_serial(benchmark::State& state) {
    auto p = make_profiles(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto s = divrate::kernels::euler_clamp_step_serial(p.n, p.B, 1e-4, p.out);
        benchmark::DoNotOptimize(s);
    }
}

void bm_euler_step_omp(benchmark::State& state) {
    auto p = make_profiles(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto s = divrate::kernels::euler_clamp_step_omp(p.n, p.B, 1e-4, p.out);
        benchmark::DoNotOptimize(s);
    }
}

void bm_blocked_sum_serial(benchmark::State& state) {
    auto p = make_profiles(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(divrate::kernels::blocked_sum_serial(p.n));
    }
}

void bm_blocked_sum_omp(benchmark::State& state) {
    auto p = make_profiles(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(divrate::kernels::blocked_sum_omp(p.n));
    }
}

void bm_convolve_serial(benchmark::State& state) {
    auto p = make_profiles(static_cast<std::size_t>(state.range(0)));
    std::vector<double> w(101, 1.0 / 101.0);
    for (auto _ : state) {
        divrate::kernels::convolve_causal_serial(p.n, w, p.out);
        benchmark::DoNotOptimize(p.out.data());
    }
}

void bm_convolve_omp(benchmark::State& state) {
    auto p = make_profiles(static_cast<std::size_t>(state.range(0)));
    std::vector<double> w(101, 1.0 / 101.0);
    for (auto _ : state) {
        divrate::kernels::convolve_causal_omp(p.n, w, p.out);
        benchmark::DoNotOptimize(p.out.data());
    }
}

} // namespace

BENCHMARK(bm_generator_rhs_serial)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(bm_generator_rhs_omp)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(bm_euler_step_serial)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(bm_euler_step_omp)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(bm_blocked_sum_serial)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(bm_blocked_sum_omp)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(bm_convolve_serial)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(bm_convolve_omp)->Arg(1 << 14)->Arg(1 << 18);

BENCHMARK_MAIN();
