#include <benchmark/benchmark.h>

#include <uzv/linalg.hpp>
#include <uzv/random.hpp>

namespace {

void BM_matmul(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto a = uzv::gaussian_matrix(n, n, 1);
    const auto b = uzv::gaussian_matrix(n, n, 2);
    for (auto _ : st) benchmark::DoNotOptimize(uzv::matmul(a, b));
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations()) * 2 * st.range(0) * st.range(0) * st.range(0));
}
BENCHMARK(BM_matmul)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_matmul_tn(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto a = uzv::gaussian_matrix(n, 40, 1);
    const auto b = uzv::gaussian_matrix(n, n, 2);
    for (auto _ : st) benchmark::DoNotOptimize(uzv::matmul_tn(a, b));
}
BENCHMARK(BM_matmul_tn)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_qr(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto a = uzv::gaussian_matrix(n, static_cast<std::size_t>(st.range(1)), 3);
    for (auto _ : st) benchmark::DoNotOptimize(uzv::qr(a));
}
BENCHMARK(BM_qr)->Args({512, 40})->Args({1000, 100})->Args({256, 256})->Unit(benchmark::kMillisecond);

void BM_qrcp(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto a = uzv::gaussian_matrix(n, n, 4);
    for (auto _ : st) benchmark::DoNotOptimize(uzv::qrcp(a, n));
}
BENCHMARK(BM_qrcp)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_svd_dense(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto a = uzv::gaussian_matrix(n, n, 5);
    for (auto _ : st) benchmark::DoNotOptimize(uzv::svd_dense(a));
}
BENCHMARK(BM_svd_dense)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_spectral_norm(benchmark::State& st) {
    const auto a = uzv::gaussian_matrix(400, 400, 6);
    for (auto _ : st) benchmark::DoNotOptimize(uzv::spectral_norm(a));
}
BENCHMARK(BM_spectral_norm)->Unit(benchmark::kMillisecond);

}  // namespace
