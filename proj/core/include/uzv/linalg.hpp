#pragma once

#include <cstddef>
#include <vector>

#include "uzv/matrix.hpp"

namespace uzv {

// ---------------------------------------------------------------------------
// products
// ---------------------------------------------------------------------------

// a * b. The stats overloads add 2*m*n*p to stats.flops; passes are left to callers,
// which know whether an operand is the data matrix.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, OpStats& stats);
// a^T * b without forming the transpose.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b, OpStats& stats);
// a * b^T without forming the transpose.
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b, OpStats& stats);

// ---------------------------------------------------------------------------
// factorizations
// ---------------------------------------------------------------------------

struct QrFactors {
    DenseMatrix q;  // m x n, orthonormal columns
    DenseMatrix r;  // n x n, upper triangular
};

// Thin Householder QR. Requires rows >= cols.
QrFactors qr(const DenseMatrix& a);

struct QrcpFactors {
    DenseMatrix q;     // m x p, p = min(m, n)
    DenseMatrix r;     // p x n, upper trapezoidal, |r_ii| non-increasing
    Permutation perm;  // a(:, perm) = q * r

    std::vector<double> rdiag() const { return r.diag(); }
};

// Businger-Golub column-pivoted Householder QR. Always runs min(m, n) steps;
// k is the intended truncation rank, validated against 1 <= k <= min(m, n).
QrcpFactors qrcp(const DenseMatrix& a, std::size_t k);

// Rank-k approximation Q(:, 0:k) R(0:k, :) P^T in the original column order.
DenseMatrix qrcp_truncate(const QrcpFactors& f, std::size_t k);

struct SvdFactors {
    DenseMatrix u;              // m x p
    std::vector<double> sigma;  // p values, non-increasing, >= 0
    DenseMatrix v;              // n x p
};

// Thin SVD by Householder bidiagonalization followed by implicit-shift QR
// (Golub-Kahan-Reinsch). Throws ConvergenceError past 30 * min(m, n) QR sweeps.
SvdFactors svd_dense(const DenseMatrix& a);

// U(:, 0:k) diag(sigma(0:k)) V(:, 0:k)^T.
DenseMatrix svd_truncate(const SvdFactors& f, std::size_t k);

// ---------------------------------------------------------------------------
// solves and norms
// ---------------------------------------------------------------------------

struct PinvApply {
    DenseMatrix value;
    std::size_t rank = 0;
    bool rank_deficient = false;  // set when C was truncated below 1e-12 * ||C||_2
};

// M * pinv(C), via a complete orthogonal decomposition of C^T. pinv(C) is never formed.
PinvApply lstsq_pinv_apply(const DenseMatrix& m, const DenseMatrix& c);

// sigma_1(A) by power iteration on A^T A (relative tolerance 1e-10, at most 5000 steps).
double spectral_norm(const DenseMatrix& a);

// Sum of singular values.
double nuclear_norm(const DenseMatrix& a);

}  // namespace uzv
