#include <benchmark/benchmark.h>

#include <uzv/rpca.hpp>
#include <uzv/synth.hpp>
#include <uzv/uzvd.hpp>

namespace {

// args: n, ell, q
uzv::SketchConfig cfg_of(const benchmark::State& st) {
    uzv::SketchConfig c;
    c.ell = c.target_rank = static_cast<std::size_t>(st.range(1));
    c.power_q = static_cast<std::size_t>(st.range(2));
    c.seed = 9;
    return c;
}

void BM_uzvd_exact(benchmark::State& st) {
    const auto g = uzv::gen_gap_matrix({static_cast<std::size_t>(st.range(0)), 20, 0.15, 1});
    const auto cfg = cfg_of(st);
    for (auto _ : st) benchmark::DoNotOptimize(uzv::uzvd(g.a, cfg));
}
BENCHMARK(BM_uzvd_exact)->Args({400, 40, 0})->Args({400, 40, 1})->Args({1000, 40, 1})->Args({1000, 100, 2})
    ->Unit(benchmark::kMillisecond);

void BM_uzvd_single_pass(benchmark::State& st) {
    const auto g = uzv::gen_gap_matrix({static_cast<std::size_t>(st.range(0)), 20, 0.15, 1});
    auto cfg = cfg_of(st);
    cfg.middle_mode = uzv::MiddleMode::SinglePass;
    for (auto _ : st) benchmark::DoNotOptimize(uzv::uzvd(g.a, cfg));
}
BENCHMARK(BM_uzvd_single_pass)->Args({400, 40, 1})->Args({1000, 40, 1})->Unit(benchmark::kMillisecond);

void BM_rsvd(benchmark::State& st) {
    const auto g = uzv::gen_gap_matrix({static_cast<std::size_t>(st.range(0)), 20, 0.15, 1});
    const auto ell = static_cast<std::size_t>(st.range(1));
    const auto q = static_cast<std::size_t>(st.range(2));
    for (auto _ : st) benchmark::DoNotOptimize(uzv::rsvd(g.a, ell, q, 9));
}
BENCHMARK(BM_rsvd)->Args({400, 40, 1})->Args({1000, 40, 1})->Unit(benchmark::kMillisecond);

void BM_rpca_alm_uzvd(benchmark::State& st) {
    const auto inst = uzv::gen_rpca_instance(static_cast<std::size_t>(st.range(0)), 3);
    auto cfg = uzv::RpcaConfig::defaults_for(inst.a);
    cfg.rank_mode = uzv::FixedRank{2 * inst.k};
    for (auto _ : st) benchmark::DoNotOptimize(uzv::rpca_solve(inst.a, cfg));
}
BENCHMARK(BM_rpca_alm_uzvd)->Arg(200)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
BENCHMARK_MAIN();
