#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "uzv/matrix.hpp"
#include "uzv/uzvd.hpp"

namespace uzv {

// Sketch size fixed at ell for every iteration.
struct FixedRank {
    std::size_t ell = 0;
};

// ell = k + p with k the smallest integer satisfying sqrt(k) >= ||M||_* / ||M||_F,
// re-evaluated on every B-update argument. `fast` takes ||M||_* from the previous
// iteration's |z|-values instead of a reference SVD.
struct RankBound {
    std::size_t p = 2;
    bool fast = false;
};

using RankMode = std::variant<FixedRank, RankBound>;

// How the B-update is cut from a UZV decomposition of M.
// Hard keeps the leading rows of Z with |z_i| > nu untouched; SoftCore shrinks the
// singular values of the ell x ell core Z by nu (cheap, since Z is small).
enum class CoreShrink { SoftCore, Hard };

struct RpcaConfig {
    double gamma = 0.0;  // weight of ||C||_1
    double eta0 = 0.0;
    double eta_bar = 0.0;  // penalty cap
    double tau = 1.6;
    double tol = 1e-4;
    std::size_t max_iters = 100;
    SketchConfig sketch;  // power_q, seed and stabilize are used; ell/target_rank come from rank_mode
    RankMode rank_mode = RankBound{};
    CoreShrink core_shrink = CoreShrink::SoftCore;

    // gamma = 1/sqrt(max(m, n)), eta0 = 1.25 / ||A||_2, eta_bar = 1e7 eta0, tau = 1.6, q = 2.
    static RpcaConfig defaults_for(const DenseMatrix& a);
};

// Throws ArgumentError unless tau > 1, tol > 0, gamma > 0, eta0 > 0.
void validate(const RpcaConfig& cfg);

struct RpcaSolution {
    DenseMatrix b_star;
    DenseMatrix c_star;
    std::size_t iters = 0;
    double rel_error_xi = 0.0;
    bool converged = false;
    std::vector<std::size_t> rank_history;
    std::vector<double> eta_history;       // eta used in each iteration
    std::vector<double> residual_history;  // xi after each iteration
    std::size_t sparsity = 0;              // entries of C* above 1e-9 max|A|

    std::size_t detected_rank() const { return rank_history.empty() ? 0 : rank_history.back(); }
};

// Entry-wise soft threshold sgn(x) max(|x| - nu, 0).
DenseMatrix shrink(const DenseMatrix& m, double nu);

struct Thresholded {
    DenseMatrix value;
    std::size_t rank = 0;
};

// U(:, 0:s) Z(0:s, :) V^T, s = #{ |z_i| > nu } from a UZV decomposition of m.
Thresholded uzv_threshold(const DenseMatrix& m, double nu, const SketchConfig& sketch);

// (U Z_u) diag(max(sigma_z - nu, 0)) (V Z_v)^T from Z = Z_u diag(sigma_z) Z_v^T.
Thresholded uzv_soft_threshold(const DenseMatrix& m, double nu, const SketchConfig& sketch);

// Singular value thresholding: U diag(max(sigma - nu, 0)) V^T with a dense reference SVD.
Thresholded svd_threshold(const DenseMatrix& m, double nu);

// ceil((||M||_* / ||M||_F)^2) + p; p for the zero matrix.
std::size_t rank_bound(const DenseMatrix& m, std::size_t p);
std::size_t rank_bound_from_values(const std::vector<double>& values, double frobenius, std::size_t p);

// Robust PCA by inexact ALM with UZV thresholding on the low-rank update.
RpcaSolution rpca_solve(const DenseMatrix& a, const RpcaConfig& cfg);

// Same iteration with singular value thresholding from a dense SVD.
RpcaSolution inexact_alm_baseline(const DenseMatrix& a, const RpcaConfig& cfg);

// ||B||_* + gamma ||C||_1
double rpca_objective(const DenseMatrix& b, const DenseMatrix& c, double gamma);

}  // namespace uzv
