#include "uzv/rpca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uzv/error.hpp"
#include "uzv/linalg.hpp"

namespace uzv {

RpcaConfig RpcaConfig::defaults_for(const DenseMatrix& a) {
    RpcaConfig cfg;
    cfg.gamma = 1.0 / std::sqrt(static_cast<double>(std::max(a.rows(), a.cols())));
    const double s1 = spectral_norm(a);
    cfg.eta0 = s1 > 0.0 ? 1.25 / s1 : 1.0;
    cfg.eta_bar = cfg.eta0 * 1e7;
    cfg.tau = 1.6;
    cfg.sketch.power_q = 2;
    return cfg;
}

void validate(const RpcaConfig& cfg) {
    if (!(cfg.tau > 1.0)) throw ArgumentError("rpca: tau must exceed 1");
    if (!(cfg.tol > 0.0)) throw ArgumentError("rpca: tol must be positive");
    if (!(cfg.gamma > 0.0)) throw ArgumentError("rpca: gamma must be positive");
    if (!(cfg.eta0 > 0.0)) throw ArgumentError("rpca: eta0 must be positive");
}

DenseMatrix shrink(const DenseMatrix& m, double nu) {
    if (!(nu >= 0.0)) throw ArgumentError("shrink: threshold must be non-negative");
    DenseMatrix out = m;
    for (double& x : out.data()) {
        const double mag = std::fabs(x) - nu;
        x = mag > 0.0 ? std::copysign(mag, x) : 0.0;
    }
    return out;
}

namespace {

Thresholded truncate_factors(const UzvFactors& f, double nu, std::size_t rows, std::size_t cols) {
    std::size_t s = 0;
    for (double z : f.z_values)
        if (std::fabs(z) > nu) ++s;
    if (s == 0) return {DenseMatrix(rows, cols), 0};
    return {matmul_nt(matmul(f.u.cols_range(0, s), f.z.rows_range(0, s)), f.v), s};
}

Thresholded soft_core(const UzvFactors& f, double nu, std::size_t rows, std::size_t cols) {
    const SvdFactors zs = svd_dense(f.z);
    std::size_t s = 0;
    while (s < zs.sigma.size() && zs.sigma[s] > nu) ++s;
    if (s == 0) return {DenseMatrix(rows, cols), 0};
    DenseMatrix left = matmul(f.u, zs.u.cols_range(0, s));
    for (std::size_t i = 0; i < left.rows(); ++i)
        for (std::size_t j = 0; j < s; ++j) left(i, j) *= zs.sigma[j] - nu;
    return {matmul_nt(left, matmul(f.v, zs.v.cols_range(0, s))), s};
}

}  // namespace

Thresholded uzv_soft_threshold(const DenseMatrix& m, double nu, const SketchConfig& sketch) {
    if (!(nu >= 0.0)) throw ArgumentError("uzv_soft_threshold: threshold must be non-negative");
    return soft_core(uzvd(m, sketch), nu, m.rows(), m.cols());
}

Thresholded uzv_threshold(const DenseMatrix& m, double nu, const SketchConfig& sketch) {
    if (!(nu >= 0.0)) throw ArgumentError("uzv_threshold: threshold must be non-negative");
    return truncate_factors(uzvd(m, sketch), nu, m.rows(), m.cols());
}

Thresholded svd_threshold(const DenseMatrix& m, double nu) {
    if (!(nu >= 0.0)) throw ArgumentError("svd_threshold: threshold must be non-negative");
    const SvdFactors f = svd_dense(m);
    std::size_t s = 0;
    while (s < f.sigma.size() && f.sigma[s] > nu) ++s;
    if (s == 0) return {DenseMatrix(m.rows(), m.cols()), 0};
    DenseMatrix us = f.u.cols_range(0, s);
    for (std::size_t i = 0; i < us.rows(); ++i)
        for (std::size_t j = 0; j < s; ++j) us(i, j) *= f.sigma[j] - nu;
    return {matmul_nt(us, f.v.cols_range(0, s)), s};
}

std::size_t rank_bound_from_values(const std::vector<double>& values, double frobenius, std::size_t p) {
    if (frobenius == 0.0) return p;
    double nuc = 0.0;
    for (double v : values) nuc += std::fabs(v);
    const double ratio2 = (nuc / frobenius) * (nuc / frobenius);
    // absorb rounding so an exact integer ratio is not bumped up
    const double k = std::ceil(ratio2 * (1.0 - 1e-9));
    return static_cast<std::size_t>(std::max(1.0, k)) + p;
}

std::size_t rank_bound(const DenseMatrix& m, std::size_t p) {
    const double fro = m.frobenius_norm();
    if (fro == 0.0) return p;
    return rank_bound_from_values(svd_dense(m).sigma, fro, p);
}

double rpca_objective(const DenseMatrix& b, const DenseMatrix& c, double gamma) {
    double l1 = 0.0;
    for (double x : c.data()) l1 += std::fabs(x);
    return nuclear_norm(b) + gamma * l1;
}

namespace {

std::size_t count_sparse(const DenseMatrix& c, double threshold) {
    return static_cast<std::size_t>(
        std::count_if(c.data().begin(), c.data().end(), [&](double x) { return std::fabs(x) > threshold; }));
}

// Shared inexact-ALM loop; `low_rank(M, nu, iteration)` returns the thresholded B update.
template <typename LowRankStep>
RpcaSolution alm_loop(const DenseMatrix& a, const RpcaConfig& cfg, LowRankStep&& low_rank) {
    validate(cfg);
    RpcaSolution sol;
    sol.b_star = DenseMatrix(a.rows(), a.cols());
    sol.c_star = DenseMatrix(a.rows(), a.cols());
    const double anorm = a.frobenius_norm();
    if (anorm == 0.0) {
        sol.converged = true;
        return sol;
    }
    const double s1 = spectral_norm(a);
    DenseMatrix y = a;
    y *= 1.0 / std::max(s1, a.max_abs() / cfg.gamma);
    double eta = cfg.eta0;
    DenseMatrix& b = sol.b_star;
    DenseMatrix& c = sol.c_star;

    for (std::size_t i = 0; i < cfg.max_iters; ++i) {
        const double inv_eta = 1.0 / eta;
        DenseMatrix m = a - c;
        for (std::size_t t = 0; t < m.size(); ++t) m.data()[t] += inv_eta * y.data()[t];
        Thresholded step = low_rank(m, inv_eta, i);
        b = std::move(step.value);

        DenseMatrix r = a - b;
        for (std::size_t t = 0; t < r.size(); ++t) r.data()[t] += inv_eta * y.data()[t];
        c = shrink(r, cfg.gamma * inv_eta);

        DenseMatrix resid = a - b;
        resid -= c;
        for (std::size_t t = 0; t < y.size(); ++t) y.data()[t] += eta * resid.data()[t];

        const double xi = resid.frobenius_norm() / anorm;
        sol.rank_history.push_back(step.rank);
        sol.eta_history.push_back(eta);
        sol.residual_history.push_back(xi);
        sol.iters = i + 1;
        // continuation: eta grows geometrically up to the cap eta_bar
        eta = std::min(cfg.tau * eta, cfg.eta_bar);
        if (xi < cfg.tol) {
            sol.converged = true;
            break;
        }
    }
    DenseMatrix resid = a - b;
    resid -= c;
    sol.rel_error_xi = resid.frobenius_norm() / anorm;
    sol.sparsity = count_sparse(c, 1e-9 * a.max_abs());
    return sol;
}

}  // namespace

RpcaSolution rpca_solve(const DenseMatrix& a, const RpcaConfig& cfg) {
    const std::size_t pmin = std::min(a.rows(), a.cols());
    const std::size_t cap = std::max<std::size_t>(1, pmin / 2);
    std::vector<double> last_z;
    return alm_loop(a, cfg, [&](const DenseMatrix& m, double nu, std::size_t iter) {
        SketchConfig sk = cfg.sketch;
        sk.seed = cfg.sketch.seed + iter;
        if (const auto* fixed = std::get_if<FixedRank>(&cfg.rank_mode)) {
            sk.ell = std::clamp<std::size_t>(fixed->ell, 1, pmin);
        } else {
            const auto& bound = std::get<RankBound>(cfg.rank_mode);
            const std::size_t l = (bound.fast && !last_z.empty())
                                      ? rank_bound_from_values(last_z, m.frobenius_norm(), bound.p)
                                      : rank_bound(m, bound.p);
            sk.ell = std::clamp<std::size_t>(l, 1, cap);
        }
        sk.target_rank = sk.ell;
        const UzvFactors f = uzvd(m, sk);
        last_z = f.z_values;
        if (cfg.core_shrink == CoreShrink::Hard) return truncate_factors(f, nu, m.rows(), m.cols());
        return soft_core(f, nu, m.rows(), m.cols());
    });
}

RpcaSolution inexact_alm_baseline(const DenseMatrix& a, const RpcaConfig& cfg) {
    return alm_loop(a, cfg, [](const DenseMatrix& m, double nu, std::size_t) { return svd_threshold(m, nu); });
}

}  // namespace uzv
