#include "uzv/uzvd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uzv/error.hpp"
#include "uzv/random.hpp"

namespace uzv {

SketchConfig SketchConfig::for_rank(std::size_t k, std::uint64_t seed) {
    SketchConfig cfg;
    cfg.target_rank = k;
    cfg.ell = 2 * k;
    cfg.power_q = 1;
    cfg.seed = seed;
    return cfg;
}

void validate(const SketchConfig& cfg, std::size_t rows, std::size_t cols) {
    const std::size_t p = std::min(rows, cols);
    if (cfg.target_rank == 0 || cfg.target_rank > cfg.ell || cfg.ell > p) {
        throw ArgumentError("sketch config needs 0 < k <= ell <= min(m, n); got k=" +
                            std::to_string(cfg.target_rank) + ", ell=" + std::to_string(cfg.ell) + " for " +
                            std::to_string(rows) + "x" + std::to_string(cols));
    }
}

DenseMatrix UzvFactors::reconstruct() const { return matmul_nt(matmul(u, z), v); }

DenseMatrix sketch_column(const DenseMatrix& a, const DenseMatrix& theta) {
    if (theta.rows() != a.cols())
        throw DimensionError("sketch_column: test matrix " + theta.shape_string() + " does not fit A " +
                             a.shape_string());
    return matmul(a, theta);
}

DenseMatrix sketch_row(const DenseMatrix& a, const DenseMatrix& f) {
    if (f.rows() != a.rows())
        throw DimensionError("sketch_row: sketch " + f.shape_string() + " does not fit A " + a.shape_string());
    return matmul_tn(a, f);
}

PowerSketch power_sketch(const DenseMatrix& a, const SketchConfig& cfg) {
    validate(cfg, a.rows(), a.cols());
    const bool stabilize = cfg.stabilize_enabled();
    PowerSketch out;
    DenseMatrix t = gaussian_matrix(a.cols(), cfg.ell, cfg.seed);
    for (std::size_t j = 0; j <= cfg.power_q; ++j) {
        const bool last = j == cfg.power_q;
        if (last) out.t_pre = t;
        DenseMatrix f = matmul(a, t, out.stats);
        ++out.stats.passes;
        if (stabilize && !last) f = qr(f).q;
        t = matmul_tn(a, f, out.stats);
        ++out.stats.passes;
        if (stabilize && !last) t = qr(t).q;
        if (last) out.f = std::move(f);
    }
    out.t_post = std::move(t);
    return out;
}

Bases qr_bases(const DenseMatrix& f, const DenseMatrix& t) {
    if (f.cols() != t.cols())
        throw DimensionError("qr_bases: sketches " + f.shape_string() + " and " + t.shape_string() +
                             " have different widths");
    return {qr(f).q, qr(t).q};
}

DenseMatrix middle_exact(const DenseMatrix& a, const DenseMatrix& u, const DenseMatrix& v) {
    if (u.rows() != a.rows() || v.rows() != a.cols())
        throw DimensionError("middle_exact: bases " + u.shape_string() + ", " + v.shape_string() +
                             " do not fit A " + a.shape_string());
    return matmul_tn(u, matmul(a, v));
}

MiddleApprox middle_approx(const DenseMatrix& u, const DenseMatrix& f, const DenseMatrix& v,
                           const DenseMatrix& theta_eff) {
    if (u.rows() != f.rows() || v.rows() != theta_eff.rows())
        throw DimensionError("middle_approx: shapes U " + u.shape_string() + ", F " + f.shape_string() + ", V " +
                             v.shape_string() + ", Theta " + theta_eff.shape_string() + " do not conform");
    const DenseMatrix utf = matmul_tn(u, f);
    const DenseMatrix vtt = matmul_tn(v, theta_eff);
    auto solved = lstsq_pinv_apply(utf, vtt);
    return {std::move(solved.value), solved.rank_deficient};
}

Permuted permute_by_zvalues(const DenseMatrix& u, const DenseMatrix& z, const DenseMatrix& v) {
    const std::size_t l = z.rows();
    if (z.cols() != l || u.cols() != l || v.cols() != l)
        throw DimensionError("permute_by_zvalues: Z " + z.shape_string() + " with U " + u.shape_string() +
                             ", V " + v.shape_string());
    Permutation perm(l);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return std::fabs(z(a, a)) > std::fabs(z(b, b)); });
    DenseMatrix zs(l, l);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j) zs(i, j) = z(perm[i], perm[j]);
    return {permute_columns(u, perm), std::move(zs), permute_columns(v, perm), std::move(perm)};
}

namespace {

UzvFactors uzvd_tall(const DenseMatrix& a, const SketchConfig& cfg) {
    PowerSketch sk = power_sketch(a, cfg);
    Bases b = qr_bases(sk.f, sk.t_post);
    UzvFactors out;
    out.mode = cfg.middle_mode;
    out.stats = sk.stats;
    DenseMatrix z;
    if (cfg.middle_mode == MiddleMode::Exact) {
        z = matmul_tn(b.u, matmul(a, b.v, out.stats), out.stats);
        ++out.stats.passes;
    } else {
        auto approx = middle_approx(b.u, sk.f, b.v, sk.t_pre);
        z = std::move(approx.z);
        out.pinv_rank_deficient = approx.rank_deficient;
    }
    Permuted p = permute_by_zvalues(b.u, z, b.v);
    out.u = std::move(p.u);
    out.z = std::move(p.z);
    out.v = std::move(p.v);
    out.perm = std::move(p.perm);
    out.z_values = out.z.diag();
    return out;
}

}  // namespace

UzvFactors uzvd(const DenseMatrix& a, const SketchConfig& cfg) {
    validate(cfg, a.rows(), a.cols());
    if (a.rows() >= a.cols()) return uzvd_tall(a, cfg);
    // A^T = U Z V^T  =>  A = V Z^T U^T
    UzvFactors t = uzvd_tall(a.transpose(), cfg);
    std::swap(t.u, t.v);
    t.z = t.z.transpose();
    return t;
}

SvdFactors rsvd(const DenseMatrix& a, std::size_t ell, std::size_t q, std::uint64_t seed,
                std::optional<bool> stabilize) {
    OpStats ignored;
    return rsvd(a, ell, q, seed, ignored, stabilize);
}

SvdFactors rsvd(const DenseMatrix& a, std::size_t ell, std::size_t q, std::uint64_t seed, OpStats& stats,
                std::optional<bool> stabilize) {
    if (ell == 0 || ell > std::min(a.rows(), a.cols()))
        throw ArgumentError("rsvd: ell=" + std::to_string(ell) + " outside [1, min(m, n)] for " + a.shape_string());
    const bool stab = stabilize.value_or(q >= 1);
    DenseMatrix y = matmul(a, gaussian_matrix(a.cols(), ell, seed), stats);
    ++stats.passes;
    for (std::size_t j = 0; j < q; ++j) {
        if (stab) y = qr(y).q;
        DenseMatrix w = matmul_tn(a, y, stats);
        if (stab) w = qr(w).q;
        y = matmul(a, w, stats);
        stats.passes += 2;
    }
    DenseMatrix qb = qr(y).q;
    const DenseMatrix b = matmul_tn(qb, a, stats);  // ell x n
    ++stats.passes;
    SvdFactors small = svd_dense(b);
    return {matmul(qb, small.u, stats), std::move(small.sigma), std::move(small.v)};
}

RevealReport reveal_report(const DenseMatrix& a, const UzvFactors& fac, std::size_t k, const SvdFactors& ref) {
    const std::size_t l = fac.ell();
    if (k == 0 || k > l || k > ref.sigma.size())
        throw ArgumentError("reveal_report: k=" + std::to_string(k) + " outside [1, " + std::to_string(l) + "]");
    if (std::min(a.rows(), a.cols()) != ref.sigma.size())
        throw DimensionError("reveal_report: reference SVD was not computed on A " + a.shape_string());
    RevealReport r;
    r.k = k;
    const auto zk = svd_dense(fac.z.block(0, 0, k, k));
    r.sigma_min_zk = zk.sigma.back();
    if (k < l) {
        r.norm_he = spectral_norm(fac.z.block(k, 0, l - k, l));
        r.norm_ge = spectral_norm(fac.z.block(0, k, l, l - k));
    }
    r.ref_sigma_1 = ref.sigma.front();
    r.ref_sigma_k = ref.sigma[k - 1];
    r.ref_sigma_k1 = k < ref.sigma.size() ? ref.sigma[k] : 0.0;
    r.zvalue_rel_errors.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double s = ref.sigma[i];
        const double d = std::fabs(std::fabs(fac.z_values[i]) - s);
        r.zvalue_rel_errors[i] = s > 0.0 ? d / s : d;
    }
    return r;
}

std::size_t estimate_rank(const std::vector<double>& z_values, double threshold) {
    if (z_values.empty()) return 0;
    const double top = std::fabs(z_values.front());
    if (top == 0.0) return 0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < z_values.size(); ++i)
        if (std::fabs(z_values[i]) / top > threshold) k = i + 1;
    return k;
}

double approx_error(const DenseMatrix& a, const DenseMatrix& approx) {
    if (a.rows() != approx.rows() || a.cols() != approx.cols())
        throw DimensionError("approx_error: " + a.shape_string() + " vs " + approx.shape_string());
    return (a - approx).frobenius_norm();
}

}  // namespace uzv
