#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "uzv/matrix.hpp"

namespace uzv {

// Rank-k signal with a linear spectrum from 1 to 1e-9, plus Gaussian noise of
// spectral norm gap * sigma_k.
struct GapMatrixSpec {
    std::size_t n = 200;
    std::size_t k = 20;
    double gap = 0.15;
    std::uint64_t seed = 0;
};

// Staircase spectrum: ceil(n / step_width) plateaus descending geometrically from top to bottom.
struct StairsSpec {
    std::size_t n = 200;
    std::size_t step_width = 10;
    std::uint64_t seed = 0;
    double top = 1.0;
    double bottom = 1e-6;
};

struct Generated {
    DenseMatrix a;
    std::vector<double> true_sigma;  // spectrum of the noise-free component, length n
};

struct RpcaInstance {
    DenseMatrix a, b_true, c_true;
    std::size_t k = 0;
    std::size_t c_count = 0;
};

// Random n x k matrix with orthonormal columns (Q factor of a seeded Gaussian).
DenseMatrix random_orthonormal(std::size_t n, std::size_t k, std::uint64_t seed);

Generated gen_gap_matrix(const GapMatrixSpec& spec);
Generated gen_devils_stairs(const StairsSpec& spec);
// B = W Q^T with k = round(0.05 n), plus 0.05 n^2 entries of +-100 at distinct positions.
RpcaInstance gen_rpca_instance(std::size_t n, std::uint64_t seed);

// n x n matrix U diag(sigma) V^T with random orthonormal U, V.
DenseMatrix with_spectrum(std::size_t n, const std::vector<double>& sigma, std::uint64_t seed);

}  // namespace uzv
