#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "uzv/error.hpp"
#include "uzv/linalg.hpp"
#include "uzv/random.hpp"
#include "uzv/synth.hpp"
#include "uzv/uzvd.hpp"

using uzv::DenseMatrix;

namespace {

DenseMatrix rank_r(std::size_t m, std::size_t n, std::size_t r, std::uint64_t seed) {
    return uzv::matmul(uzv::gaussian_matrix(m, r, seed), uzv::gaussian_matrix(r, n, seed + 7777));
}

uzv::SketchConfig cfg_of(std::size_t ell, std::size_t q, std::uint64_t seed,
                         uzv::MiddleMode mode = uzv::MiddleMode::Exact) {
    uzv::SketchConfig c;
    c.ell = ell;
    c.target_rank = ell;
    c.power_q = q;
    c.seed = seed;
    c.middle_mode = mode;
    return c;
}

}  // namespace

TEST_CASE("sketch_column and sketch_row") {
    const auto theta = uzv::gaussian_matrix(6, 3, 1);
    CHECK(uzv::sketch_column(DenseMatrix::identity(6), theta) == theta);

    DenseMatrix u(8, 1), v(1, 6);
    for (std::size_t i = 0; i < 8; ++i) u(i, 0) = static_cast<double>(i) + 1.0;
    for (std::size_t j = 0; j < 6; ++j) v(0, j) = 1.0 - 0.3 * static_cast<double>(j);
    const auto f = uzv::sketch_column(oracle::naive_matmul(u, v), theta);
    for (std::size_t j = 0; j < 3; ++j) {
        const double s = f(0, j) / u(0, 0);
        for (std::size_t i = 0; i < 8; ++i) CHECK(f(i, j) == doctest::Approx(s * u(i, 0)).epsilon(1e-12));
    }

    const auto a = uzv::gaussian_matrix(9, 6, 2);
    CHECK(oracle::max_abs_diff(uzv::sketch_column(a, theta), oracle::naive_matmul(a, theta)) <= 1e-14);

    const auto fr = uzv::gaussian_matrix(6, 3, 3);
    CHECK(uzv::sketch_row(DenseMatrix::identity(6), fr) == fr);
    const auto q = oracle::mgs_basis(uzv::gaussian_matrix(6, 6, 4));
    CHECK(oracle::fro(uzv::sketch_row(q, fr)) == doctest::Approx(oracle::fro(fr)).epsilon(1e-12));
    const auto f9 = uzv::gaussian_matrix(9, 4, 5);
    CHECK(oracle::max_abs_diff(uzv::sketch_row(a, f9), oracle::naive_matmul(oracle::naive_transpose(a), f9)) <= 1e-14);
    CHECK_THROWS_AS((void)uzv::sketch_row(a, uzv::gaussian_matrix(8, 2, 1)), uzv::DimensionError);
}

TEST_CASE("power_sketch range and determinism") {
    const auto a = rank_r(40, 30, 6, 11);
    const auto sk = uzv::power_sketch(a, cfg_of(6, 0, 3));
    CHECK(oracle::projector_distance(oracle::mgs_basis(sk.f), oracle::mgs_basis(a, 1e-9)) <= 1e-8);

    const auto s1 = uzv::power_sketch(a, cfg_of(6, 2, 3));
    const auto s2 = uzv::power_sketch(a, cfg_of(6, 2, 3));
    CHECK(s1.f == s2.f);
    CHECK(s1.t_pre == s2.t_pre);
    CHECK(s1.t_post == s2.t_post);
    // the last F is A times the T that entered it
    CHECK(oracle::max_abs_diff(s1.f, oracle::naive_matmul(a, s1.t_pre)) <= 1e-12 * oracle::fro(s1.f));
}

TEST_CASE("power iterations pull the sketch onto the dominant eigenspace") {
    // diagonal PSD with known eigenvectors: the dominant eigenspace is the first ell coordinates
    const std::size_t n = 50, l = 5;
    const double r = 0.5;  // sigma_{l+1} / sigma_l
    std::vector<double> d(n, r);
    for (std::size_t i = 0; i < l; ++i) d[i] = 1.0;
    const auto a = DenseMatrix::diagonal(d);
    // sin of the largest principal angle between range(F) and span(e_1..e_l)
    auto sin_angle = [&](const DenseMatrix& f) {
        const auto q = oracle::mgs_basis(f);
        return oracle::singular_values(q.rows_range(l, n - l))[0];
    };
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        // tan(angle) <= r^(2q+1) ||Theta_2|| ||Theta_1^-1|| for F spanning A^(2q+1) Theta
        const auto theta = uzv::gaussian_matrix(n, l, seed);
        const double t2 = oracle::singular_values(theta.rows_range(l, n - l))[0];
        const double t1 = oracle::singular_values(theta.rows_range(0, l)).back();
        double prev = 1.0;
        for (std::size_t q = 0; q <= 2; ++q) {
            const double s = sin_angle(uzv::power_sketch(a, cfg_of(l, q, seed)).f);
            CHECK(s <= std::pow(r, 2.0 * static_cast<double>(q) + 1.0) * t2 / t1 * (1.0 + 1e-10));
            CHECK(s <= prev);
            prev = s;
        }
    }
}

TEST_CASE("qr_bases") {
    const auto f = oracle::mgs_basis(uzv::gaussian_matrix(10, 3, 1));
    const auto t = uzv::gaussian_matrix(7, 3, 2);
    const auto b = uzv::qr_bases(f, t);
    for (std::size_t j = 0; j < 3; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < 10; ++i) dot += b.u(i, j) * f(i, j);
        CHECK(std::fabs(dot) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(oracle::orth_defect_fro(b.v) <= 1e-12);
    CHECK(oracle::projector_distance(b.v, oracle::mgs_basis(t)) <= 1e-12);
    CHECK_THROWS_AS((void)uzv::qr_bases(f, uzv::gaussian_matrix(7, 2, 2)), uzv::DimensionError);
}

TEST_CASE("middle_exact") {
    const auto a = uzv::gaussian_matrix(5, 5, 1);
    const auto i5 = DenseMatrix::identity(5);
    CHECK(oracle::max_abs_diff(uzv::middle_exact(a, i5, i5), a) == 0.0);

    const auto u = oracle::mgs_basis(uzv::gaussian_matrix(9, 3, 2));
    const auto v = oracle::mgs_basis(uzv::gaussian_matrix(6, 3, 3));
    const double s[] = {4, 2, 1};
    const auto built = oracle::naive_matmul(oracle::naive_matmul(u, DenseMatrix::diagonal(s)), oracle::naive_transpose(v));
    CHECK(oracle::max_abs_diff(uzv::middle_exact(built, u, v), DenseMatrix::diagonal(s)) <= 1e-13);

    const auto b = uzv::gaussian_matrix(9, 6, 4);
    const auto want = oracle::naive_matmul(oracle::naive_matmul(oracle::naive_transpose(u), b), v);
    CHECK(oracle::max_abs_diff(uzv::middle_exact(b, u, v), want) <= 1e-13);
}

TEST_CASE("middle_approx agrees with exact on exactly rank-ell input") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto a = rank_r(60, 45, 8, 100 + seed);
        const auto sk = uzv::power_sketch(a, cfg_of(8, 1, seed));
        const auto b = uzv::qr_bases(sk.f, sk.t_post);
        const auto zx = uzv::middle_exact(a, b.u, b.v);
        const auto za = uzv::middle_approx(b.u, sk.f, b.v, sk.t_pre);
        auto d = za.z;
        d -= zx;
        CHECK(oracle::fro(d) <= 1e-8 * oracle::fro(zx));
    }
    // identity, ell = n, invertible Theta
    const auto i6 = DenseMatrix::identity(6);
    const auto theta = uzv::gaussian_matrix(6, 6, 9);
    const auto b = uzv::qr_bases(theta, theta);
    const auto za = uzv::middle_approx(b.u, theta, b.v, theta).z;
    const auto zx = uzv::middle_exact(i6, b.u, b.v);
    CHECK(oracle::max_abs_diff(za, zx) <= 1e-10);
}

TEST_CASE("single-pass error stays within 2x of exact mode on the gap suite") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto g = uzv::gen_gap_matrix({200, 20, 0.15, seed});
        auto c = uzv::SketchConfig::for_rank(20, seed);
        const double ex = uzv::approx_error(g.a, uzv::uzvd(g.a, c).reconstruct());
        c.middle_mode = uzv::MiddleMode::SinglePass;
        const double sp = uzv::approx_error(g.a, uzv::uzvd(g.a, c).reconstruct());
        CHECK(sp <= 2.0 * ex);
    }
}

TEST_CASE("permute_by_zvalues") {
    const DenseMatrix z{{3, 0.1, 0.2}, {0.3, 1, 0.4}, {0.5, 0.6, 2}};
    const auto u = oracle::mgs_basis(uzv::gaussian_matrix(7, 3, 1));
    const auto v = oracle::mgs_basis(uzv::gaussian_matrix(5, 3, 2));
    const auto p = uzv::permute_by_zvalues(u, z, v);
    CHECK(p.perm == uzv::Permutation{0, 2, 1});
    CHECK(p.z.diag() == std::vector<double>{3, 2, 1});

    const DenseMatrix sorted{{3, 1, 0}, {0, 2, 1}, {0, 0, -1}};
    const auto ps = uzv::permute_by_zvalues(u, sorted, v);
    CHECK(ps.perm == uzv::Permutation{0, 1, 2});
    CHECK(ps.z == sorted);
    CHECK(ps.u == u);

    const auto zr = uzv::gaussian_matrix(3, 3, 5);
    const auto pr = uzv::permute_by_zvalues(u, zr, v);
    const auto before = oracle::naive_matmul(oracle::naive_matmul(u, zr), oracle::naive_transpose(v));
    const auto after = oracle::naive_matmul(oracle::naive_matmul(pr.u, pr.z), oracle::naive_transpose(pr.v));
    CHECK(oracle::max_abs_diff(before, after) <= 1e-12);
}

TEST_CASE("uzvd recovers exactly low-rank matrices") {
    for (std::size_t q : {0, 1, 2}) {
        const auto a = rank_r(50, 35, 7, 40 + q);
        const auto f = uzv::uzvd(a, cfg_of(7, q, q));
        CHECK(uzv::approx_error(a, f.reconstruct()) <= 1e-8 * oracle::fro(a));
    }
    const auto w = rank_r(20, 45, 5, 3);  // wide input goes through the transpose
    const auto f = uzv::uzvd(w, cfg_of(5, 1, 1));
    CHECK(f.u.rows() == 20);
    CHECK(f.v.rows() == 45);
    CHECK(uzv::approx_error(w, f.reconstruct()) <= 1e-8 * oracle::fro(w));
}

TEST_CASE("uzvd factor invariants") {
    for (std::size_t q = 0; q <= 3; ++q)
        for (auto [m, n] : {std::pair<std::size_t, std::size_t>{80, 50}, {50, 80}, {60, 60}}) {
            const auto a = uzv::gaussian_matrix(m, n, m * 3 + n + q);
            for (auto mode : {uzv::MiddleMode::Exact, uzv::MiddleMode::SinglePass}) {
                const auto f = uzv::uzvd(a, cfg_of(12, q, q + 1, mode));
                CHECK(oracle::orth_defect_fro(f.u) <= 1e-8 * 12);
                CHECK(oracle::orth_defect_fro(f.v) <= 1e-8 * 12);
                for (std::size_t i = 0; i < 12; ++i) CHECK(f.z_values[i] == f.z(i, i));
                for (std::size_t i = 0; i + 1 < 12; ++i) CHECK(std::fabs(f.z_values[i]) >= std::fabs(f.z_values[i + 1]));
            }
        }
}

TEST_CASE("uzvd zero matrix and pass counts") {
    const auto f = uzv::uzvd(DenseMatrix(10, 8), cfg_of(3, 1, 0));
    for (double z : f.z_values) CHECK(z == 0.0);
    CHECK(uzv::approx_error(DenseMatrix(10, 8), f.reconstruct()) == 0.0);

    const auto a = uzv::gaussian_matrix(30, 20, 1);
    for (std::size_t q = 0; q < 4; ++q) {
        CHECK(uzv::uzvd(a, cfg_of(5, q, 0)).stats.passes == 2 * q + 3);
        CHECK(uzv::uzvd(a, cfg_of(5, q, 0, uzv::MiddleMode::SinglePass)).stats.passes == 2 * q + 2);
    }
}

TEST_CASE("uzvd determinism") {
    const auto a = uzv::gaussian_matrix(40, 30, 2);
    const auto f1 = uzv::uzvd(a, cfg_of(10, 2, 9));
    const auto f2 = uzv::uzvd(a, cfg_of(10, 2, 9));
    CHECK(f1.u == f2.u);
    CHECK(f1.z == f2.z);
    CHECK(f1.v == f2.v);
    CHECK(f1.perm == f2.perm);
}

TEST_CASE("uzvd config validation") {
    const auto a = uzv::gaussian_matrix(10, 8, 1);
    auto c = cfg_of(9, 1, 0);
    CHECK_THROWS_AS((void)uzv::uzvd(a, c), uzv::ArgumentError);
    c = cfg_of(4, 1, 0);
    c.target_rank = 5;
    CHECK_THROWS_AS((void)uzv::uzvd(a, c), uzv::ArgumentError);
    c.target_rank = 0;
    CHECK_THROWS_AS((void)uzv::uzvd(a, c), uzv::ArgumentError);
    const auto d = uzv::SketchConfig::for_rank(7);
    CHECK(d.ell == 14);
    CHECK(d.power_q == 1);
}

TEST_CASE("rsvd recovers exactly low-rank matrices") {
    const auto a = rank_r(45, 30, 6, 5);
    for (std::size_t q : {0, 1, 2}) {
        const auto f = uzv::rsvd(a, 6, q, 3);
        CHECK(uzv::approx_error(a, uzv::svd_truncate(f, 6)) <= 1e-8 * oracle::fro(a));
    }
    uzv::OpStats s;
    (void)uzv::rsvd(a, 6, 2, 3, s);
    CHECK(s.passes == 2 * 2 + 2);
}

TEST_CASE("reveal_report on a constructed diagonal") {
    const double eps = 1e-7;
    std::vector<double> d{10, 9, 8, 7, 6, eps, eps / 2, eps / 4};
    const auto a = DenseMatrix::diagonal(d);
    uzv::UzvFactors f;
    f.u = DenseMatrix::identity(8);
    f.v = DenseMatrix::identity(8);
    f.z = a;
    f.z_values = d;
    const auto r = uzv::reveal_report(a, f, 5, uzv::svd_dense(a));
    CHECK(r.sigma_min_zk == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(r.norm_he == doctest::Approx(eps).epsilon(1e-8));
    CHECK(r.norm_ge == doctest::Approx(eps).epsilon(1e-8));
    for (double e : r.zvalue_rel_errors) CHECK(e <= 1e-14);
}

TEST_CASE("reveal_report on the gap matrix with two power steps") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto g = uzv::gen_gap_matrix({200, 20, 0.15, seed});
        const auto ref = uzv::svd_dense(g.a);
        auto c = uzv::SketchConfig::for_rank(20, seed + 500);
        c.power_q = 2;
        const auto r = uzv::reveal_report(g.a, uzv::uzvd(g.a, c), 20, ref);
        CHECK(r.sigma_min_zk >= 0.5 * r.ref_sigma_k);
        CHECK(r.sigma_min_zk <= r.ref_sigma_k + 1e-8 * r.ref_sigma_1);
        CHECK(r.norm_he <= 5.0 * r.ref_sigma_k1);
        CHECK(r.norm_he >= 0.0);
        CHECK(r.norm_ge >= 0.0);
    }
}

TEST_CASE("approx_error") {
    const auto a = uzv::gaussian_matrix(12, 9, 4);
    CHECK(uzv::approx_error(a, a) == 0.0);
    CHECK(uzv::approx_error(a, DenseMatrix(12, 9)) == doctest::Approx(oracle::fro(a)).epsilon(1e-14));
    const auto f = uzv::svd_dense(a);
    for (std::size_t k : {1, 4, 8}) {
        double tail = 0.0;
        for (std::size_t i = k; i < f.sigma.size(); ++i) tail += f.sigma[i] * f.sigma[i];
        CHECK(uzv::approx_error(a, uzv::svd_truncate(f, k)) == doctest::Approx(std::sqrt(tail)).epsilon(1e-10));
    }
}

TEST_CASE("estimate_rank") {
    CHECK(uzv::estimate_rank({1.0, 0.5, 1e-3, 1e-9, 1e-12}) == 3);
    CHECK(uzv::estimate_rank({-2.0, 1.0, -1e-8}) == 2);
    CHECK(uzv::estimate_rank({0.0, 0.0}) == 0);
    CHECK(uzv::estimate_rank({1.0, 1e-3}, 1e-2) == 1);
}
