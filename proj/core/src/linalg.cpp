#include "uzv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uzv/error.hpp"
#include "uzv/random.hpp"

namespace uzv {

namespace {

void require_inner(const DenseMatrix& a, const DenseMatrix& b, std::size_t ka, std::size_t kb, const char* op) {
    if (ka != kb) {
        throw DimensionError(std::string(op) + ": inner dimensions differ for " + a.shape_string() + " and " +
                             b.shape_string());
    }
}

std::uint64_t product_flops(std::size_t m, std::size_t k, std::size_t n) {
    return 2ULL * static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(n);
}

// Column-major scratch matrix used inside the factorizations, where the
// Householder and Givens updates walk down columns.
class ColMajor {
public:
    ColMajor(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), d_(rows * cols, 0.0) {}

    explicit ColMajor(const DenseMatrix& a) : ColMajor(a.rows(), a.cols()) {
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = a(i, j);
    }

    double& operator()(std::size_t i, std::size_t j) noexcept { return d_[i + j * rows_]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i + j * rows_]; }
    double* col(std::size_t j) noexcept { return d_.data() + j * rows_; }
    const double* col(std::size_t j) const noexcept { return d_.data() + j * rows_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    DenseMatrix to_dense(std::size_t nr, std::size_t nc) const {
        DenseMatrix out(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(i, j);
        return out;
    }

    void swap_cols(std::size_t a, std::size_t b) {
        std::swap_ranges(col(a), col(a) + rows_, col(b));
    }

private:
    std::size_t rows_, cols_;
    std::vector<double> d_;
};

// Euclidean norm of x[0:n] with scaling against under/overflow.
double scaled_norm(const double* x, std::size_t n) {
    double amax = 0.0;
    for (std::size_t i = 0; i < n; ++i) amax = std::max(amax, std::fabs(x[i]));
    if (amax == 0.0 || !std::isfinite(amax)) return amax;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = x[i] / amax;
        s += t * t;
    }
    return amax * std::sqrt(s);
}

// Householder reflector annihilating x[1:n]. On return x[0] = beta (the new
// diagonal), x[1:n] holds v with implicit v[0] = 1, and the return value is tau.
double make_reflector(double* x, std::size_t n) {
    const double alpha = scaled_norm(x, n);
    if (alpha == 0.0) return 0.0;
    const double x0 = x[0];
    const double beta = -std::copysign(alpha, x0);
    const double v0 = x0 - beta;
    for (std::size_t i = 1; i < n; ++i) x[i] /= v0;
    x[0] = beta;
    return (beta - x0) / beta;
}

// y[0:n] -= tau * v (v^T y), v[0] = 1 implicit.
void apply_reflector(const double* v, double tau, double* y, std::size_t n) {
    if (tau == 0.0) return;
    double s = y[0];
    for (std::size_t i = 1; i < n; ++i) s += v[i] * y[i];
    s *= tau;
    y[0] -= s;
    for (std::size_t i = 1; i < n; ++i) y[i] -= s * v[i];
}

// Thin Q (rows x p) from reflectors stored below the diagonal of w.
ColMajor form_q(const ColMajor& w, const std::vector<double>& tau, std::size_t p) {
    const std::size_t m = w.rows();
    ColMajor q(m, p);
    for (std::size_t j = 0; j < p; ++j) q(j, j) = 1.0;
    for (std::size_t jj = p; jj-- > 0;) {
        const double* v = w.col(jj) + jj;
        for (std::size_t c = jj; c < p; ++c) apply_reflector(v, tau[jj], q.col(c) + jj, m - jj);
    }
    return q;
}

}  // namespace

// ---------------------------------------------------------------------------

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    require_inner(a, b, a.cols(), b.rows(), "matmul");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    DenseMatrix c(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c.row(i).data();
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a(i, p);
            if (aip == 0.0) continue;
            const double* bp = b.row(p).data();
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
    return c;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, OpStats& stats) {
    auto c = matmul(a, b);
    stats.flops += product_flops(a.rows(), a.cols(), b.cols());
    return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
    require_inner(a, b, a.rows(), b.rows(), "matmul_tn");
    const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
    DenseMatrix c(m, n);
    for (std::size_t p = 0; p < k; ++p) {
        const double* ap = a.row(p).data();
        const double* bp = b.row(p).data();
        for (std::size_t i = 0; i < m; ++i) {
            const double api = ap[i];
            if (api == 0.0) continue;
            double* ci = c.row(i).data();
            for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
        }
    }
    return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b, OpStats& stats) {
    auto c = matmul_tn(a, b);
    stats.flops += product_flops(a.cols(), a.rows(), b.cols());
    return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
    require_inner(a, b, a.cols(), b.cols(), "matmul_nt");
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    DenseMatrix c(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a.row(i).data();
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b.row(j).data();
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
            c(i, j) = s;
        }
    }
    return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b, OpStats& stats) {
    auto c = matmul_nt(a, b);
    stats.flops += product_flops(a.rows(), a.cols(), b.rows());
    return c;
}

// ---------------------------------------------------------------------------

QrFactors qr(const DenseMatrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    if (m < n) {
        throw DimensionError("qr: input " + a.shape_string() +
                             " has fewer rows than columns; factor the transpose instead");
    }
    ColMajor w(a);
    std::vector<double> tau(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        tau[j] = make_reflector(w.col(j) + j, m - j);
        for (std::size_t c = j + 1; c < n; ++c) apply_reflector(w.col(j) + j, tau[j], w.col(c) + j, m - j);
    }
    DenseMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) r(i, j) = w(i, j);
    return {form_q(w, tau, n).to_dense(m, n), std::move(r)};
}

QrcpFactors qrcp(const DenseMatrix& a, std::size_t k) {
    const std::size_t m = a.rows(), n = a.cols(), p = std::min(m, n);
    if (k < 1 || k > p) {
        throw ArgumentError("qrcp: rank " + std::to_string(k) + " outside [1, " + std::to_string(p) + "] for " +
                            a.shape_string());
    }
    ColMajor w(a);
    Permutation perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<double> tau(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        // trailing norms are recomputed each step; no downdating drift
        std::size_t best = j;
        double best_norm = -1.0;
        for (std::size_t c = j; c < n; ++c) {
            const double nc = scaled_norm(w.col(c) + j, m - j);
            if (nc > best_norm) {
                best_norm = nc;
                best = c;
            }
        }
        if (best != j) {
            w.swap_cols(j, best);
            std::swap(perm[j], perm[best]);
        }
        tau[j] = make_reflector(w.col(j) + j, m - j);
        for (std::size_t c = j + 1; c < n; ++c) apply_reflector(w.col(j) + j, tau[j], w.col(c) + j, m - j);
    }
    DenseMatrix r(p, n);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < n; ++j) r(i, j) = w(i, j);
    return {form_q(w, tau, p).to_dense(m, p), std::move(r), std::move(perm)};
}

DenseMatrix qrcp_truncate(const QrcpFactors& f, std::size_t k) {
    const std::size_t p = f.r.rows();
    if (k > p) throw ArgumentError("qrcp_truncate: rank " + std::to_string(k) + " exceeds " + std::to_string(p));
    const DenseMatrix qr_k = matmul(f.q.cols_range(0, k), f.r.rows_range(0, k));
    DenseMatrix out(qr_k.rows(), qr_k.cols());
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, f.perm[j]) = qr_k(i, j);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// Golub-Kahan-Reinsch SVD of a tall (m >= n) matrix held in u, which is
// overwritten with the left singular vectors. Follows the classic EISPACK
// organisation: bidiagonalize, accumulate the right then left transforms,
// then chase the bidiagonal to diagonal with implicitly shifted QR.
void gkr_svd(ColMajor& u, std::vector<double>& w, ColMajor& v) {
    const std::size_t m = u.rows(), n = u.cols();
    std::vector<double> rv1(n, 0.0);
    std::vector<double> tmp(std::max(m, n), 0.0);
    double g = 0.0, scale = 0.0, anorm = 0.0;
    std::size_t l = 0;

    for (std::size_t i = 0; i < n; ++i) {
        l = i + 1;
        rv1[i] = scale * g;
        g = scale = 0.0;
        double s = 0.0;
        {
            double* ci = u.col(i);
            for (std::size_t k = i; k < m; ++k) scale += std::fabs(ci[k]);
            if (scale != 0.0) {
                for (std::size_t k = i; k < m; ++k) {
                    ci[k] /= scale;
                    s += ci[k] * ci[k];
                }
                const double f = ci[i];
                g = -std::copysign(std::sqrt(s), f);
                const double h = f * g - s;
                ci[i] = f - g;
                for (std::size_t j = l; j < n; ++j) {
                    double* cj = u.col(j);
                    double sj = 0.0;
                    for (std::size_t k = i; k < m; ++k) sj += ci[k] * cj[k];
                    const double fj = sj / h;
                    for (std::size_t k = i; k < m; ++k) cj[k] += fj * ci[k];
                }
                for (std::size_t k = i; k < m; ++k) ci[k] *= scale;
            }
        }
        w[i] = scale * g;
        g = s = scale = 0.0;
        if (i + 1 != n) {
            for (std::size_t k = l; k < n; ++k) scale += std::fabs(u(i, k));
            if (scale != 0.0) {
                for (std::size_t k = l; k < n; ++k) {
                    u(i, k) /= scale;
                    s += u(i, k) * u(i, k);
                }
                const double f = u(i, l);
                g = -std::copysign(std::sqrt(s), f);
                const double h = f * g - s;
                u(i, l) = f - g;
                for (std::size_t k = l; k < n; ++k) rv1[k] = u(i, k) / h;
                // rows l..m-1: a(j,:) += (a(j,:) . a(i,:)) rv1, done column-wise
                std::fill(tmp.begin() + static_cast<std::ptrdiff_t>(l), tmp.begin() + static_cast<std::ptrdiff_t>(m),
                          0.0);
                for (std::size_t k = l; k < n; ++k) {
                    const double aik = u(i, k);
                    const double* ck = u.col(k);
                    for (std::size_t j = l; j < m; ++j) tmp[j] += ck[j] * aik;
                }
                for (std::size_t k = l; k < n; ++k) {
                    const double r = rv1[k];
                    double* ck = u.col(k);
                    for (std::size_t j = l; j < m; ++j) ck[j] += tmp[j] * r;
                }
                for (std::size_t k = l; k < n; ++k) u(i, k) *= scale;
            }
        }
        anorm = std::max(anorm, std::fabs(w[i]) + std::fabs(rv1[i]));
    }

    // right-hand transformations
    for (std::size_t i = n; i-- > 0;) {
        if (i + 1 < n) {
            if (g != 0.0) {
                const double ail = u(i, l);
                for (std::size_t j = l; j < n; ++j) v(j, i) = (u(i, j) / ail) / g;
                for (std::size_t k = l; k < n; ++k) tmp[k] = u(i, k);
                const double* vi = v.col(i);
                for (std::size_t j = l; j < n; ++j) {
                    double* vj = v.col(j);
                    double s = 0.0;
                    for (std::size_t k = l; k < n; ++k) s += tmp[k] * vj[k];
                    for (std::size_t k = l; k < n; ++k) vj[k] += s * vi[k];
                }
            }
            for (std::size_t j = l; j < n; ++j) v(i, j) = v(j, i) = 0.0;
        }
        v(i, i) = 1.0;
        g = rv1[i];
        l = i;
    }

    // left-hand transformations
    for (std::size_t i = n; i-- > 0;) {
        l = i + 1;
        g = w[i];
        for (std::size_t j = l; j < n; ++j) u(i, j) = 0.0;
        double* ci = u.col(i);
        if (g != 0.0) {
            g = 1.0 / g;
            for (std::size_t j = l; j < n; ++j) {
                double* cj = u.col(j);
                double s = 0.0;
                for (std::size_t k = l; k < m; ++k) s += ci[k] * cj[k];
                const double f = (s / ci[i]) * g;
                for (std::size_t k = i; k < m; ++k) cj[k] += f * ci[k];
            }
            for (std::size_t j = i; j < m; ++j) ci[j] *= g;
        } else {
            for (std::size_t j = i; j < m; ++j) ci[j] = 0.0;
        }
        ci[i] += 1.0;
    }

    auto rotate = [](double* x, double* y, std::size_t len, double c, double s) {
        for (std::size_t j = 0; j < len; ++j) {
            const double a = x[j], b = y[j];
            x[j] = a * c + b * s;
            y[j] = b * c - a * s;
        }
    };

    const std::size_t sweep_cap = 30 * n;
    std::size_t sweeps = 0;
    for (std::size_t k = n; k-- > 0;) {
        for (;;) {
            bool cancel = true;
            std::size_t ll = k;
            std::size_t nm = 0;
            for (;; --ll) {
                if (std::fabs(rv1[ll]) + anorm == anorm) {  // rv1[0] is always zero
                    cancel = false;
                    break;
                }
                nm = ll - 1;
                if (std::fabs(w[nm]) + anorm == anorm) break;
            }
            if (cancel) {
                double c = 0.0, s = 1.0;
                for (std::size_t i = ll; i <= k; ++i) {
                    const double f = s * rv1[i];
                    rv1[i] = c * rv1[i];
                    if (std::fabs(f) + anorm == anorm) break;
                    const double gg = w[i];
                    double h = std::hypot(f, gg);
                    w[i] = h;
                    h = 1.0 / h;
                    c = gg * h;
                    s = -f * h;
                    rotate(u.col(nm), u.col(i), m, c, s);
                }
            }
            const double z = w[k];
            if (ll == k) {
                if (z < 0.0) {
                    w[k] = -z;
                    double* vk = v.col(k);
                    for (std::size_t j = 0; j < n; ++j) vk[j] = -vk[j];
                }
                break;
            }
            if (++sweeps > sweep_cap) throw ConvergenceError("svd_dense: bidiagonal QR did not converge", sweeps);

            double x = w[ll];
            nm = k - 1;
            double y = w[nm];
            double gg = rv1[nm];
            double h = rv1[k];
            double f = ((y - z) * (y + z) + (gg - h) * (gg + h)) / (2.0 * h * y);
            gg = std::hypot(f, 1.0);
            f = ((x - z) * (x + z) + h * ((y / (f + std::copysign(gg, f))) - h)) / x;
            double c = 1.0, s = 1.0;
            for (std::size_t j = ll; j <= nm; ++j) {
                const std::size_t i = j + 1;
                gg = rv1[i];
                y = w[i];
                h = s * gg;
                gg = c * gg;
                double zz = std::hypot(f, h);
                rv1[j] = zz;
                c = f / zz;
                s = h / zz;
                f = x * c + gg * s;
                gg = gg * c - x * s;
                h = y * s;
                y *= c;
                rotate(v.col(j), v.col(i), n, c, s);
                zz = std::hypot(f, h);
                w[j] = zz;
                if (zz != 0.0) {
                    zz = 1.0 / zz;
                    c = f * zz;
                    s = h * zz;
                }
                f = c * gg + s * y;
                x = c * y - s * gg;
                rotate(u.col(j), u.col(i), m, c, s);
            }
            rv1[ll] = 0.0;
            rv1[k] = f;
            w[k] = x;
        }
    }
}

}  // namespace

SvdFactors svd_dense(const DenseMatrix& a) {
    if (!a.all_finite()) throw ArgumentError("svd_dense: input has non-finite entries");
    const bool wide = a.rows() < a.cols();
    const DenseMatrix tall = wide ? a.transpose() : a;
    const std::size_t m = tall.rows(), n = tall.cols();
    if (n == 0) return {DenseMatrix(a.rows(), 0), {}, DenseMatrix(a.cols(), 0)};

    ColMajor u(tall);
    ColMajor v(n, n);
    std::vector<double> w(n, 0.0);
    gkr_svd(u, w, v);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return w[x] > w[y]; });

    SvdFactors out{DenseMatrix(m, n), std::vector<double>(n), DenseMatrix(n, n)};
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t src = order[c];
        out.sigma[c] = w[src];
        for (std::size_t i = 0; i < m; ++i) out.u(i, c) = u(i, src);
        for (std::size_t i = 0; i < n; ++i) out.v(i, c) = v(i, src);
    }
    if (wide) std::swap(out.u, out.v);
    return out;
}

DenseMatrix svd_truncate(const SvdFactors& f, std::size_t k) {
    if (k > f.sigma.size()) throw ArgumentError("svd_truncate: rank exceeds number of singular values");
    DenseMatrix us = f.u.cols_range(0, k);
    for (std::size_t i = 0; i < us.rows(); ++i)
        for (std::size_t j = 0; j < k; ++j) us(i, j) *= f.sigma[j];
    return matmul_nt(us, f.v.cols_range(0, k));
}

// ---------------------------------------------------------------------------

PinvApply lstsq_pinv_apply(const DenseMatrix& m, const DenseMatrix& c) {
    // M C^+ = M Q_r S^{-1} W^T P^T, where C^T P = Q R, R(0:r, :)^T = W S.
    if (m.cols() != c.cols()) {
        throw DimensionError("lstsq_pinv_apply: M " + m.shape_string() + " does not conform with pinv of C " +
                             c.shape_string());
    }
    const std::size_t rows = m.rows(), p = c.rows();
    PinvApply out{DenseMatrix(rows, p), 0, false};
    if (c.cols() == 0 || p == 0 || c.max_abs() == 0.0) {
        out.rank_deficient = true;
        return out;
    }
    const DenseMatrix ct = c.transpose();  // q x p
    const QrcpFactors f = qrcp(ct, 1);
    // |r00| is the largest column norm, within sqrt(p) of ||C||_2; no need for a power iteration here
    const double tol = 1e-12 * std::fabs(f.r(0, 0));
    std::size_t rank = 0;
    while (rank < f.r.rows() && std::fabs(f.r(rank, rank)) > tol) ++rank;
    out.rank = rank;
    out.rank_deficient = rank < std::min(c.rows(), c.cols());
    if (rank == 0) return out;

    const QrFactors ws = qr(f.r.rows_range(0, rank).transpose());  // p x rank, rank x rank
    DenseMatrix y = matmul(m, f.q.cols_range(0, rank));              // rows x rank
    // y <- y S^{-1}, row by row forward substitution
    for (std::size_t i = 0; i < rows; ++i) {
        auto yi = y.row(i);
        for (std::size_t j = 0; j < rank; ++j) {
            double s = yi[j];
            for (std::size_t t = 0; t < j; ++t) s -= yi[t] * ws.r(t, j);
            yi[j] = s / ws.r(j, j);
        }
    }
    const DenseMatrix xp = matmul_nt(y, ws.q);  // rows x p, in pivoted order
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < p; ++j) out.value(i, f.perm[j]) = xp(i, j);
    return out;
}

double spectral_norm(const DenseMatrix& a) {
    if (a.empty() || a.max_abs() == 0.0) return 0.0;
    const std::size_t n = a.cols();
    // fixed start vector keeps the result deterministic
    DenseMatrix x = gaussian_matrix(n, 1, 0x5eed5eed5eedULL);
    x *= 1.0 / x.frobenius_norm();
    double lambda = 0.0;
    for (int it = 0; it < 5000; ++it) {
        const DenseMatrix y = matmul(a, x);
        DenseMatrix z = matmul_tn(a, y);
        const double yn = y.frobenius_norm();
        lambda = yn * yn;
        const double zn = z.frobenius_norm();
        if (zn == 0.0) return 0.0;
        // eigen-residual of A^T A at the Rayleigh quotient
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = z(i, 0) - lambda * x(i, 0);
            res += d * d;
        }
        z *= 1.0 / zn;
        x = std::move(z);
        if (std::sqrt(res) <= 1e-10 * lambda) break;
    }
    // one more Rayleigh quotient with the last iterate
    const double yn = matmul(a, x).frobenius_norm();
    return std::max(yn, std::sqrt(lambda));
}

double nuclear_norm(const DenseMatrix& a) {
    const auto f = svd_dense(a);
    return std::accumulate(f.sigma.begin(), f.sigma.end(), 0.0);
}

}  // namespace uzv
