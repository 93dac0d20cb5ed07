#pragma once

#include <array>
#include <cstdint>

#include "uzv/matrix.hpp"

namespace uzv {

// xoshiro256** seeded through splitmix64. Fixed algorithm so sketches and
// generated test matrices are reproducible from a 64-bit seed.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()();

    // Uniform in [0, 1) with 53 random bits.
    double uniform();
    // Uniform integer in [0, bound), rejection sampled (no modulo bias).
    std::uint64_t below(std::uint64_t bound);
    // Standard normal via the Marsaglia polar method.
    double normal();

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// rows x cols matrix of i.i.d. N(0, 1) entries, filled row-major from Xoshiro256(seed).
DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace uzv

namespace uzv {

// Independent 64-bit seed for sub-stream `stream` of `seed` (splitmix64 finalizer of the pair).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace uzv
