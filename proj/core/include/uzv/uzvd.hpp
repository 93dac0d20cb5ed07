#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "uzv/linalg.hpp"
#include "uzv/matrix.hpp"

namespace uzv {

enum class MiddleMode {
    Exact,       // Z = U^T A V, one extra pass over A
    SinglePass,  // Z = (U^T F) pinv(V^T T_pre), no extra pass
};

struct SketchConfig {
    std::size_t ell = 0;          // sample size
    std::size_t target_rank = 0;  // k, used for block partitioning
    std::size_t power_q = 1;
    std::uint64_t seed = 0;
    MiddleMode middle_mode = MiddleMode::Exact;
    // Re-orthonormalize between power steps. Unset means "on for q >= 1".
    std::optional<bool> stabilize;

    bool stabilize_enabled() const { return stabilize.value_or(power_q >= 1); }

    // ell = 2k, q = 1.
    static SketchConfig for_rank(std::size_t k, std::uint64_t seed = 0);
};

// Throws ArgumentError unless 0 < k <= ell <= min(rows, cols).
void validate(const SketchConfig& cfg, std::size_t rows, std::size_t cols);

struct PowerSketch {
    DenseMatrix f;       // m x ell, final A * t_pre
    DenseMatrix t_pre;   // n x ell, the T that produced f
    DenseMatrix t_post;  // n x ell, A^T f
    OpStats stats;
};

struct UzvFactors {
    DenseMatrix u;  // m x ell, orthonormal, permuted
    DenseMatrix z;  // ell x ell, permuted symmetrically
    DenseMatrix v;  // n x ell, orthonormal, permuted
    Permutation perm;
    std::vector<double> z_values;  // diag(z)
    MiddleMode mode = MiddleMode::Exact;
    OpStats stats;
    bool pinv_rank_deficient = false;  // SinglePass only

    std::size_t ell() const { return z.rows(); }
    // U Z V^T
    DenseMatrix reconstruct() const;
};

// F = A Theta.
DenseMatrix sketch_column(const DenseMatrix& a, const DenseMatrix& theta);
// T = A^T F.
DenseMatrix sketch_row(const DenseMatrix& a, const DenseMatrix& f);

// Runs F <- A T, T <- A^T F exactly q + 1 times from a Gaussian T(seed).
PowerSketch power_sketch(const DenseMatrix& a, const SketchConfig& cfg);

struct Bases {
    DenseMatrix u;
    DenseMatrix v;
};

Bases qr_bases(const DenseMatrix& f, const DenseMatrix& t);

DenseMatrix middle_exact(const DenseMatrix& a, const DenseMatrix& u, const DenseMatrix& v);

struct MiddleApprox {
    DenseMatrix z;
    bool rank_deficient = false;
};

// (U^T F) pinv(V^T theta_eff). theta_eff must be the matrix F was formed from.
MiddleApprox middle_approx(const DenseMatrix& u, const DenseMatrix& f, const DenseMatrix& v,
                           const DenseMatrix& theta_eff);

struct Permuted {
    DenseMatrix u, z, v;
    Permutation perm;
};

// Stable sort of |diag(z)| in non-increasing order; U P, P^T Z P, V P.
Permuted permute_by_zvalues(const DenseMatrix& u, const DenseMatrix& z, const DenseMatrix& v);

// Randomized rank-revealing UZV decomposition. Wide inputs are factored through
// their transpose with U and V swapped on output.
UzvFactors uzvd(const DenseMatrix& a, const SketchConfig& cfg);

// Randomized SVD: range finder on A Gamma (plus q power steps), QR, SVD of Q^T A.
// Stabilization follows the SketchConfig rule (on for q >= 1) unless overridden.
SvdFactors rsvd(const DenseMatrix& a, std::size_t ell, std::size_t q, std::uint64_t seed,
                std::optional<bool> stabilize = std::nullopt);
SvdFactors rsvd(const DenseMatrix& a, std::size_t ell, std::size_t q, std::uint64_t seed, OpStats& stats,
                std::optional<bool> stabilize = std::nullopt);

struct RevealReport {
    std::size_t k = 0;
    double sigma_min_zk = 0.0;
    double norm_he = 0.0;  // ||[H E]||_2
    double norm_ge = 0.0;  // ||[G^T E^T]^T||_2
    double ref_sigma_1 = 0.0;
    double ref_sigma_k = 0.0;
    double ref_sigma_k1 = 0.0;  // 0 when k equals the number of reference values
    std::vector<double> zvalue_rel_errors;  // | |z_i| - sigma_i | / sigma_i, i < k
};

RevealReport reveal_report(const DenseMatrix& a, const UzvFactors& fac, std::size_t k, const SvdFactors& ref);

// Largest i with |z_i| / |z_1| > threshold; 0 for an all-zero spectrum.
std::size_t estimate_rank(const std::vector<double>& z_values, double threshold = 1e-6);

// ||A - approx||_F
double approx_error(const DenseMatrix& a, const DenseMatrix& approx);

}  // namespace uzv
