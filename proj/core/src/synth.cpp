#include "uzv/synth.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "uzv/error.hpp"
#include "uzv/linalg.hpp"
#include "uzv/random.hpp"

namespace uzv {

DenseMatrix random_orthonormal(std::size_t n, std::size_t k, std::uint64_t seed) {
    return qr(gaussian_matrix(n, k, seed)).q;
}

DenseMatrix with_spectrum(std::size_t n, const std::vector<double>& sigma, std::uint64_t seed) {
    const std::size_t k = sigma.size();
    if (k == 0 || k > n) throw ArgumentError("with_spectrum: need 1 <= len(sigma) <= n");
    DenseMatrix u = random_orthonormal(n, k, derive_seed(seed, 1));
    const DenseMatrix v = random_orthonormal(n, k, derive_seed(seed, 2));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) u(i, j) *= sigma[j];
    return matmul_nt(u, v);
}

Generated gen_gap_matrix(const GapMatrixSpec& spec) {
    if (spec.k == 0 || spec.k >= spec.n) throw ArgumentError("gen_gap_matrix: need 0 < k < n");
    if (!(spec.gap >= 0.0)) throw ArgumentError("gen_gap_matrix: gap must be non-negative");
    std::vector<double> sigma(spec.k);
    for (std::size_t i = 0; i < spec.k; ++i) {
        const double t = spec.k == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(spec.k - 1);
        sigma[i] = std::pow(1e-9, t);
    }
    DenseMatrix a = with_spectrum(spec.n, sigma, spec.seed);
    if (spec.gap > 0.0) {
        DenseMatrix noise = gaussian_matrix(spec.n, spec.n, derive_seed(spec.seed, 3));
        noise *= spec.gap * sigma.back() / spectral_norm(noise);
        a += noise;
    }
    sigma.resize(spec.n, 0.0);
    return {std::move(a), std::move(sigma)};
}

Generated gen_devils_stairs(const StairsSpec& spec) {
    if (spec.n == 0 || spec.step_width == 0 || spec.step_width > spec.n)
        throw ArgumentError("gen_devils_stairs: need 1 <= step_width <= n");
    if (!(spec.top > spec.bottom && spec.bottom > 0.0))
        throw ArgumentError("gen_devils_stairs: need top > bottom > 0");
    const std::size_t steps = (spec.n + spec.step_width - 1) / spec.step_width;
    std::vector<double> sigma(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const std::size_t s = i / spec.step_width;
        const double t = steps == 1 ? 0.0 : static_cast<double>(s) / static_cast<double>(steps - 1);
        sigma[i] = spec.top * std::pow(spec.bottom / spec.top, t);
    }
    return {with_spectrum(spec.n, sigma, spec.seed), sigma};
}

RpcaInstance gen_rpca_instance(std::size_t n, std::uint64_t seed) {
    if (n < 40) throw ArgumentError("gen_rpca_instance: n must be at least 40, got " + std::to_string(n));
    RpcaInstance inst;
    inst.k = static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(n)));
    inst.c_count = static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(n) * static_cast<double>(n)));
    const DenseMatrix w = gaussian_matrix(n, inst.k, derive_seed(seed, 1));
    const DenseMatrix q = gaussian_matrix(n, inst.k, derive_seed(seed, 2));
    inst.b_true = matmul_nt(w, q);

    // partial Fisher-Yates over linear indices
    Xoshiro256 rng(derive_seed(seed, 3));
    std::vector<std::size_t> idx(n * n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    inst.c_true = DenseMatrix(n, n);
    auto cdata = inst.c_true.data();
    for (std::size_t i = 0; i < inst.c_count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
        std::swap(idx[i], idx[j]);
        cdata[idx[i]] = (rng() >> 63) ? 100.0 : -100.0;
    }
    inst.a = inst.b_true + inst.c_true;
    return inst;
}

}  // namespace uzv
