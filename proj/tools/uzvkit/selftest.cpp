#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>

#include "commands.hpp"
#include "uzv/error.hpp"
#include "uzv/linalg.hpp"
#include "uzv/random.hpp"
#include "uzv/rpca.hpp"
#include "uzv/synth.hpp"
#include "uzv/uzvd.hpp"

using uzv::DenseMatrix;

namespace uzvkit {
namespace {

struct Check {
    bool ok = true;
    std::string detail;
    void expect(bool cond, const std::string& what) {
        if (!cond && ok) detail = what;
        ok = ok && cond;
    }
};

// Kernels under test; the canary swaps in a broken QR.
struct Kernels {
    std::function<uzv::QrFactors(const DenseMatrix&)> qr;
};

Kernels make_kernels(bool canary) {
    Kernels k;
    if (!canary) {
        k.qr = [](const DenseMatrix& a) { return uzv::qr(a); };
    } else {
        k.qr = [](const DenseMatrix& a) {
            auto f = uzv::qr(a);
            f.q(0, 0) += 1e-3;
            return f;
        };
    }
    return k;
}

double orth_defect(const DenseMatrix& q) {
    DenseMatrix g = uzv::matmul_tn(q, q);
    g -= DenseMatrix::identity(q.cols());
    return g.max_abs();
}

double rel(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).frobenius_norm() / a.frobenius_norm(); }

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations; independent of the GKR SVD.
std::vector<double> jacobi_eigenvalues(DenseMatrix s) {
    const std::size_t n = s.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
        if (off < 1e-30 * std::max(1.0, s.frobenius_norm())) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (s(p, q) == 0.0) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
                const double t = std::copysign(1.0, theta) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    const double sp = s(r, p), sq = s(r, q);
                    s(r, p) = c * sp - sn * sq;
                    s(r, q) = sn * sp + c * sq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double sp = s(p, r), sq = s(q, r);
                    s(p, r) = c * sp - sn * sq;
                    s(q, r) = sn * sp + c * sq;
                }
            }
    }
    std::vector<double> ev = s.diag();
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

using Property = std::function<Check(const Kernels&, std::uint64_t)>;

std::vector<std::pair<std::string, Property>> properties() {
    std::vector<std::pair<std::string, Property>> p;

    p.emplace_back("qr.orthogonality", [](const Kernels& k, std::uint64_t seed) {
        Check c;
        for (std::size_t t = 0; t < 5; ++t) {
            const auto a = uzv::gaussian_matrix(60 + 10 * t, 20 + 5 * t, uzv::derive_seed(seed, t));
            c.expect(orth_defect(k.qr(a).q) < 1e-12, "Q^T Q != I");
        }
        return c;
    });
    p.emplace_back("qr.reconstruction", [](const Kernels& k, std::uint64_t seed) {
        Check c;
        for (std::size_t t = 0; t < 5; ++t) {
            const auto a = uzv::gaussian_matrix(50 + 7 * t, 30, uzv::derive_seed(seed, 10 + t));
            const auto f = k.qr(a);
            c.expect(rel(a, uzv::matmul(f.q, f.r)) < 1e-12, "QR != A");
            for (std::size_t i = 0; i < f.r.rows(); ++i)
                for (std::size_t j = 0; j < i; ++j) c.expect(f.r(i, j) == 0.0, "R not upper triangular");
        }
        return c;
    });
    p.emplace_back("qrcp.diagonal_ordering", [](const Kernels&, std::uint64_t seed) {
        Check c;
        for (std::size_t t = 0; t < 5; ++t) {
            const auto a = uzv::gaussian_matrix(40, 30 + 5 * t, uzv::derive_seed(seed, 20 + t));
            const auto d = uzv::qrcp(a, 10).rdiag();
            for (std::size_t i = 0; i + 1 < d.size(); ++i)
                c.expect(std::fabs(d[i]) >= std::fabs(d[i + 1]) * (1.0 - 1e-12), "|r_ii| increases");
        }
        return c;
    });
    p.emplace_back("qrcp.reconstruction", [](const Kernels&, std::uint64_t seed) {
        Check c;
        const auto a = uzv::gaussian_matrix(45, 35, uzv::derive_seed(seed, 30));
        const auto f = uzv::qrcp(a, 35);
        c.expect(rel(uzv::permute_columns(a, f.perm), uzv::matmul(f.q, f.r)) < 1e-12, "A P != Q R");
        c.expect(orth_defect(f.q) < 1e-12, "Q^T Q != I");
        return c;
    });
    p.emplace_back("svd.oracle_agreement", [](const Kernels&, std::uint64_t seed) {
        Check c;
        for (std::size_t t = 0; t < 4; ++t) {
            const auto a = uzv::gaussian_matrix(30 + 10 * t, 12 + 6 * t, uzv::derive_seed(seed, 40 + t));
            const auto s = uzv::svd_dense(a).sigma;
            const auto ev = jacobi_eigenvalues(uzv::matmul_tn(a, a));
            for (std::size_t i = 0; i < s.size(); ++i)
                c.expect(std::fabs(s[i] - std::sqrt(std::max(ev[i], 0.0))) < 1e-9 * s[0], "sigma_i disagrees with Jacobi");
        }
        return c;
    });
    p.emplace_back("svd.reconstruction", [](const Kernels&, std::uint64_t seed) {
        Check c;
        for (auto [m, n] : {std::pair<std::size_t, std::size_t>{70, 40}, {40, 70}, {50, 50}}) {
            const auto a = uzv::gaussian_matrix(m, n, uzv::derive_seed(seed, 50 + m));
            const auto f = uzv::svd_dense(a);
            c.expect(orth_defect(f.u) < 1e-12 && orth_defect(f.v) < 1e-12, "singular vectors not orthonormal");
            DenseMatrix us = f.u;
            for (std::size_t i = 0; i < us.rows(); ++i)
                for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= f.sigma[j];
            c.expect(rel(a, uzv::matmul_nt(us, f.v)) < 1e-12, "U S V^T != A");
            for (std::size_t i = 0; i + 1 < f.sigma.size(); ++i) c.expect(f.sigma[i] >= f.sigma[i + 1], "sigma unsorted");
        }
        return c;
    });
    p.emplace_back("shrink.nonexpansive", [](const Kernels&, std::uint64_t seed) {
        Check c;
        for (std::size_t t = 0; t < 10; ++t) {
            const auto x = uzv::gaussian_matrix(20, 15, uzv::derive_seed(seed, 60 + t));
            const auto y = uzv::gaussian_matrix(20, 15, uzv::derive_seed(seed, 80 + t));
            const double nu = 0.1 * static_cast<double>(t);
            const double d = (uzv::shrink(x, nu) - uzv::shrink(y, nu)).frobenius_norm();
            c.expect(d <= (x - y).frobenius_norm() * (1.0 + 1e-14), "||S(x)-S(y)|| > ||x-y||");
        }
        return c;
    });
    p.emplace_back("synth.determinism", [](const Kernels&, std::uint64_t seed) {
        Check c;
        c.expect(uzv::gen_gap_matrix({60, 6, 0.15, seed}).a == uzv::gen_gap_matrix({60, 6, 0.15, seed}).a,
                 "gap matrix differs between runs");
        c.expect(uzv::gen_devils_stairs({60, 10, seed}).a == uzv::gen_devils_stairs({60, 10, seed}).a,
                 "stairs differ between runs");
        const auto r1 = uzv::gen_rpca_instance(60, seed), r2 = uzv::gen_rpca_instance(60, seed);
        c.expect(r1.a == r2.a && r1.c_true == r2.c_true, "rpca instance differs between runs");
        c.expect(!(uzv::gaussian_matrix(8, 8, seed) == uzv::gaussian_matrix(8, 8, seed + 1)), "seeds collide");
        return c;
    });
    p.emplace_back("uzvd.pass_counts", [](const Kernels&, std::uint64_t seed) {
        Check c;
        const auto a = uzv::gaussian_matrix(50, 40, uzv::derive_seed(seed, 90));
        for (std::size_t q = 0; q < 3; ++q) {
            uzv::SketchConfig cfg;
            cfg.ell = cfg.target_rank = 10;
            cfg.power_q = q;
            cfg.seed = seed;
            c.expect(uzv::uzvd(a, cfg).stats.passes == 2 * q + 3, "exact mode pass count");
            cfg.middle_mode = uzv::MiddleMode::SinglePass;
            c.expect(uzv::uzvd(a, cfg).stats.passes == 2 * q + 2, "single-pass pass count");
        }
        return c;
    });
    p.emplace_back("reveal.interlacing", [](const Kernels&, std::uint64_t seed) {
        Check c;
        for (std::size_t t = 0; t < 6; ++t) {
            const auto a = uzv::gaussian_matrix(80, 50 + 5 * t, uzv::derive_seed(seed, 100 + t));
            const auto sa = uzv::svd_dense(a).sigma;
            uzv::SketchConfig cfg;
            cfg.ell = cfg.target_rank = 20;
            cfg.seed = uzv::derive_seed(seed, 110 + t);
            const auto sz = uzv::svd_dense(uzv::uzvd(a, cfg).z).sigma;
            for (std::size_t i = 0; i < sz.size(); ++i)
                c.expect(sz[i] <= sa[i] + 1e-8 * sa[0], "sigma_i(Z) > sigma_i(A)");
        }
        return c;
    });
    p.emplace_back("reveal.bounds", [](const Kernels&, std::uint64_t seed) {
        Check c;
        const auto g = uzv::gen_gap_matrix({120, 12, 0.15, seed});
        const auto ref = uzv::svd_dense(g.a);
        uzv::SketchConfig cfg = uzv::SketchConfig::for_rank(12, uzv::derive_seed(seed, 120));
        cfg.power_q = 2;
        const auto f = uzv::uzvd(g.a, cfg);
        const auto r = uzv::reveal_report(g.a, f, 12, ref);
        c.expect(r.sigma_min_zk >= 0.5 * r.ref_sigma_k, "sigma_min(Z_k) < sigma_k / 2");
        c.expect(r.norm_he <= 5.0 * r.ref_sigma_k1, "||H_E|| > 5 sigma_{k+1}");
        for (std::size_t i = 0; i + 1 < f.z_values.size(); ++i)
            c.expect(std::fabs(f.z_values[i]) >= std::fabs(f.z_values[i + 1]), "|z| not descending");
        return c;
    });
    p.emplace_back("io.rawf64_roundtrip", [](const Kernels&, std::uint64_t seed) {
        Check c;
        const auto a = uzv::gaussian_matrix(7, 5, seed);
        c.expect(uzv::io::parse_rawf64(uzv::io::encode_rawf64(a)) == a, "RawF64 round trip not bit-exact");
        c.expect(uzv::io::parse_csv(uzv::io::encode_csv(a)) == a, "CSV round trip not exact");
        return c;
    });
    p.emplace_back("report.schema_roundtrip", [](const Kernels&, std::uint64_t seed) {
        Check c;
        Options o;
        o.n = 40;
        o.k = 4;
        o.seed = seed;
        const auto rep = cmd_spectrum(o);
        const auto back = ExperimentReport::parse(rep.to_csv());
        c.expect(back.to_csv() == rep.to_csv(), "report does not survive parse");
        c.expect(back.table("spectrum").rows.size() == 40, "spectrum row count");
        return c;
    });
    return p;
}

}  // namespace

std::vector<std::string> selftest_names() {
    std::vector<std::string> names;
    for (const auto& [n, _] : properties()) names.push_back(n);
    return names;
}

std::vector<SelftestResult> run_selftest(const SelftestOptions& opt) {
    const Kernels kernels = make_kernels(opt.canary);
    std::vector<SelftestResult> out;
    for (const auto& [name, prop] : properties()) {
        if (!opt.filter.empty() && name.find(opt.filter) == std::string::npos) continue;
        SelftestResult r;
        r.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const Check c = prop(kernels, opt.seed);
            r.passed = c.ok;
            r.detail = c.detail;
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("threw: ") + e.what();
        }
        r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

int cmd_selftest(const SelftestOptions& opt, std::ostream& os) {
    const auto results = run_selftest(opt);
    std::size_t failed = 0;
    for (const auto& r : results) {
        os << std::left << std::setw(28) << r.name << (r.passed ? "PASS" : "FAIL") << "  " << std::fixed
           << std::setprecision(1) << r.ms << " ms";
        if (!r.passed) os << "  " << r.detail;
        os << '\n';
        failed += r.passed ? 0 : 1;
    }
    os << results.size() - failed << "/" << results.size() << " properties passed\n";
    if (results.empty()) {
        os << "no property matches filter '" << opt.filter << "'\n";
        return 1;
    }
    return failed == 0 ? 0 : 1;
}

}  // namespace uzvkit
