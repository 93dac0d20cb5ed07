#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "uzv/error.hpp"
#include "uzv/linalg.hpp"
#include "uzv/random.hpp"
#include "uzv/rpca.hpp"
#include "uzv/synth.hpp"

using uzv::DenseMatrix;

TEST_CASE("shrink") {
    CHECK(uzv::shrink(DenseMatrix{{3, -0.5}}, 1) == DenseMatrix{{2, 0}});
    const auto a = uzv::gaussian_matrix(9, 7, 2);
    CHECK(uzv::shrink(a, 0.0) == a);
    const auto s = uzv::shrink(a, 0.4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double in = a.data()[i], out = s.data()[i];
        CHECK(std::fabs(out) == doctest::Approx(std::max(std::fabs(in) - 0.4, 0.0)));
        CHECK((out == 0.0 || std::signbit(out) == std::signbit(in)));
    }
    CHECK_THROWS_AS((void)uzv::shrink(a, -1.0), uzv::ArgumentError);
}

TEST_CASE("uzv_threshold") {
    const double d[] = {5, 3, 1};
    uzv::SketchConfig sk;
    sk.ell = sk.target_rank = 3;
    sk.seed = 4;
    // with ell = n the bases only line up with the coordinate axes through power steps,
    // converging like (3/5)^(2q); 20 steps put the misalignment far below 1e-6
    sk.power_q = 20;
    const auto t = uzv::uzv_threshold(DenseMatrix::diagonal(d), 2.0, sk);
    CHECK(t.rank == 2);
    const double want[] = {5, 3, 0};
    CHECK(oracle::max_abs_diff(t.value, DenseMatrix::diagonal(want)) <= 1e-6);

    const auto z = uzv::uzv_threshold(DenseMatrix::diagonal(d), 6.0, sk);
    CHECK(z.rank == 0);
    CHECK(z.value == DenseMatrix(3, 3));

    const auto m = uzv::matmul(uzv::gaussian_matrix(30, 4, 1), uzv::gaussian_matrix(4, 25, 2));
    sk.power_q = 1;
    sk.ell = sk.target_rank = 4;
    const auto r = uzv::uzv_threshold(m, 0.0, sk);
    CHECK(uzv::approx_error(m, r.value) <= 1e-8 * oracle::fro(m));
    sk.ell = sk.target_rank = 6;
    CHECK(uzv::approx_error(m, uzv::uzv_threshold(m, 0.0, sk).value) <= 1e-6 * oracle::fro(m));
}

TEST_CASE("uzv_soft_threshold matches singular value thresholding when the sketch captures the range") {
    const auto m = uzv::matmul(uzv::gaussian_matrix(30, 5, 3), uzv::gaussian_matrix(5, 20, 4));
    uzv::SketchConfig sk;
    sk.ell = sk.target_rank = 8;
    sk.seed = 1;
    const double nu = 0.5 * uzv::svd_dense(m).sigma[2];
    const auto soft = uzv::uzv_soft_threshold(m, nu, sk);
    const auto svt = uzv::svd_threshold(m, nu);
    CHECK(soft.rank == svt.rank);
    CHECK(oracle::max_abs_diff(soft.value, svt.value) <= 1e-9 * oracle::fro(m));
}

TEST_CASE("svd_threshold shrinks singular values") {
    const double d[] = {4, 2, 1};
    const auto t = uzv::svd_threshold(DenseMatrix::diagonal(d), 1.5);
    CHECK(t.rank == 2);
    const double want[] = {2.5, 0.5, 0};
    CHECK(oracle::max_abs_diff(t.value, DenseMatrix::diagonal(want)) <= 1e-12);
}

TEST_CASE("rank_bound") {
    DenseMatrix u(6, 1), v(1, 5);
    for (std::size_t i = 0; i < 6; ++i) u(i, 0) = 1.0 + static_cast<double>(i);
    for (std::size_t j = 0; j < 5; ++j) v(0, j) = 2.0 - static_cast<double>(j);
    CHECK(uzv::rank_bound(uzv::matmul(u, v), 2) == 3);
    CHECK(uzv::rank_bound(DenseMatrix::identity(4), 2) == 6);
    CHECK(uzv::rank_bound(DenseMatrix(4, 4), 2) == 2);
    for (std::size_t r : {3, 7}) {
        std::vector<double> s(r, 2.5);
        s.resize(20, 0.0);
        CHECK(uzv::rank_bound(uzv::with_spectrum(20, s, r), 2) == r + 2);
    }
}

TEST_CASE("rpca config defaults and validation") {
    const auto a = uzv::gaussian_matrix(40, 25, 1);
    const auto cfg = uzv::RpcaConfig::defaults_for(a);
    CHECK(cfg.gamma == doctest::Approx(1.0 / std::sqrt(40.0)));
    CHECK(cfg.eta0 == doctest::Approx(1.25 / uzv::svd_dense(a).sigma[0]).epsilon(1e-8));
    CHECK(cfg.eta_bar == doctest::Approx(1e7 * cfg.eta0));
    CHECK(cfg.tau == 1.6);
    CHECK(cfg.sketch.power_q == 2);
    auto bad = cfg;
    bad.tau = 1.0;
    CHECK_THROWS_AS(uzv::validate(bad), uzv::ArgumentError);
    bad = cfg;
    bad.gamma = 0.0;
    CHECK_THROWS_AS(uzv::validate(bad), uzv::ArgumentError);
    bad = cfg;
    bad.tol = 0.0;
    CHECK_THROWS_AS((void)uzv::rpca_solve(a, bad), uzv::ArgumentError);
}

TEST_CASE("clean low-rank input") {
    const auto a = uzv::matmul(uzv::gaussian_matrix(60, 3, 1), uzv::gaussian_matrix(3, 50, 2));
    auto cfg = uzv::RpcaConfig::defaults_for(a);
    cfg.rank_mode = uzv::FixedRank{6};
    for (const auto& sol : {uzv::rpca_solve(a, cfg), uzv::inexact_alm_baseline(a, cfg)}) {
        CHECK(sol.converged);
        CHECK(oracle::fro(sol.c_star) <= 1e-3 * oracle::fro(a));
        CHECK(uzv::approx_error(a, sol.b_star) <= 1e-3 * oracle::fro(a));
        CHECK(sol.detected_rank() == 3);
    }
}

TEST_CASE("sparse-only input") {
    DenseMatrix a(50, 50);
    uzv::Xoshiro256 rng(7);
    for (int t = 0; t < 40; ++t) a(rng.below(50), rng.below(50)) = rng.uniform() < 0.5 ? -100.0 : 100.0;
    auto cfg = uzv::RpcaConfig::defaults_for(a);
    cfg.rank_mode = uzv::FixedRank{4};
    const auto sol = uzv::rpca_solve(a, cfg);
    CHECK(sol.converged);
    CHECK(sol.detected_rank() == 0);
    CHECK(oracle::fro(sol.b_star) <= 1e-3 * oracle::fro(a));
    CHECK(uzv::approx_error(a, sol.c_star) <= 1e-3 * oracle::fro(a));
}

TEST_CASE("zero matrix converges immediately") {
    const DenseMatrix z(20, 20);
    auto cfg = uzv::RpcaConfig::defaults_for(uzv::gaussian_matrix(20, 20, 1));
    for (const auto& sol : {uzv::rpca_solve(z, cfg), uzv::inexact_alm_baseline(z, cfg)}) {
        CHECK(sol.converged);
        CHECK(sol.iters == 0);
        CHECK(sol.rel_error_xi == 0.0);
        CHECK(sol.b_star == z);
    }
}

TEST_CASE("solver bookkeeping") {
    const auto inst = uzv::gen_rpca_instance(100, 3);
    auto cfg = uzv::RpcaConfig::defaults_for(inst.a);
    cfg.rank_mode = uzv::FixedRank{10};
    const auto sol = uzv::rpca_solve(inst.a, cfg);
    REQUIRE(sol.iters == sol.eta_history.size());
    REQUIRE(sol.iters == sol.residual_history.size());
    REQUIRE(sol.iters == sol.rank_history.size());
    for (std::size_t i = 0; i + 1 < sol.iters; ++i) {
        CHECK(sol.eta_history[i + 1] == std::min(cfg.tau * sol.eta_history[i], cfg.eta_bar));
        CHECK(sol.eta_history[i + 1] >= sol.eta_history[i]);
    }
    for (double x : sol.residual_history) CHECK(std::isfinite(x));
    DenseMatrix r = inst.a;
    r -= sol.b_star;
    r -= sol.c_star;
    CHECK(sol.rel_error_xi == doctest::Approx(oracle::fro(r) / oracle::fro(inst.a)).epsilon(1e-10));
    if (sol.converged) CHECK(sol.rel_error_xi < cfg.tol);

    cfg.max_iters = 2;
    const auto capped = uzv::rpca_solve(inst.a, cfg);
    CHECK_FALSE(capped.converged);
    CHECK(capped.iters == 2);
}

TEST_CASE("rank bound mode tracks the true rank") {
    const auto inst = uzv::gen_rpca_instance(100, 4);
    auto cfg = uzv::RpcaConfig::defaults_for(inst.a);
    for (bool fast : {false, true}) {
        cfg.rank_mode = uzv::RankBound{2, fast};
        const auto sol = uzv::rpca_solve(inst.a, cfg);
        CHECK(sol.converged);
        CHECK(sol.detected_rank() == inst.k);
    }
}

TEST_CASE("objective") {
    const double d[] = {3, 1};
    const DenseMatrix c{{1, -2}, {0, 0.5}};
    CHECK(uzv::rpca_objective(DenseMatrix::diagonal(d), c, 0.5) == doctest::Approx(4.0 + 0.5 * 3.5));
}
