// Serial reference against OpenMP for the hot kernels.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "semra/common/rng.hpp"
#include "semra/kernels/bit_channel.hpp"
#include "semra/kernels/gemm.hpp"
#include "semra/kernels/sbq_batch.hpp"

using namespace semra;

namespace {

std::vector<double> uniform(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

std::vector<std::uint8_t> bits(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::uint8_t> v(n);
    for (auto& x : v) x = static_cast<std::uint8_t>(rng() & 1u);
    return v;
}

template <bool Parallel>
void bm_gemm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = uniform(n * n, 1), b = uniform(n * n, 2);
    std::vector<double> c(n * n);
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::parallel::gemm_nn(a, b, c, n, n, n);
        else
            kernels::serial::gemm_nn(a, b, c, n, n, n);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n * n));
}

template <bool Parallel>
void bm_qam16(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto in = bits(n, 3);
    std::vector<std::uint8_t> out(n);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::parallel::qam16_awgn(in, out, {1.0, 0.0}, 0.1, ++seed);
        else
            kernels::serial::qam16_awgn(in, out, {1.0, 0.0}, 0.1, ++seed);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <bool Parallel>
void bm_flip(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto in = bits(n, 4);
    std::vector<std::uint8_t> out(n);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::parallel::flip_bits(in, out, 0.05, ++seed);
        else
            kernels::serial::flip_bits(in, out, 0.05, ++seed);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <bool Parallel>
void bm_sbq(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto in = uniform(n, 5);
    for (auto& x : in) x = std::abs(x);
    std::vector<double> out(n);
    const sbq::SbqConfig cfg{3, 0.25};
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::parallel::sbq_roundtrip(in, out, cfg);
        else
            kernels::serial::sbq_roundtrip(in, out, cfg);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

}  // namespace

BENCHMARK(bm_gemm<false>)->Name("gemm_nn/serial")->Arg(64)->Arg(256);
BENCHMARK(bm_gemm<true>)->Name("gemm_nn/openmp")->Arg(64)->Arg(256);
BENCHMARK(bm_qam16<false>)->Name("qam16_awgn/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bm_qam16<true>)->Name("qam16_awgn/openmp")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bm_flip<false>)->Name("flip_bits/serial")->Arg(1 << 20);
BENCHMARK(bm_flip<true>)->Name("flip_bits/openmp")->Arg(1 << 20);
BENCHMARK(bm_sbq<false>)->Name("sbq_roundtrip/serial")->Arg(1 << 20);
BENCHMARK(bm_sbq<true>)->Name("sbq_roundtrip/openmp")->Arg(1 << 20);

BENCHMARK_MAIN();
