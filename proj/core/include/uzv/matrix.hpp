#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace uzv {

// Arithmetic and data-access bookkeeping returned alongside a result.
// "passes" counts full products with the input matrix A or its transpose.
struct OpStats {
    std::uint64_t flops = 0;
    std::uint64_t passes = 0;

    OpStats& operator+=(const OpStats& o) {
        flops += o.flops;
        passes += o.passes;
        return *this;
    }
};

// Row-major dense real matrix. Value type; copies are deep.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> values);
    static DenseMatrix diagonal(std::span<const double> values, std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    DenseMatrix transpose() const;
    // Copy of the nr x nc block whose top-left corner is (r0, c0).
    DenseMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    DenseMatrix cols_range(std::size_t c0, std::size_t nc) const { return block(0, c0, rows_, nc); }
    DenseMatrix rows_range(std::size_t r0, std::size_t nr) const { return block(r0, 0, nr, cols_); }
    std::vector<double> diag() const;

    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;

    DenseMatrix& operator+=(const DenseMatrix& o);
    DenseMatrix& operator-=(const DenseMatrix& o);
    DenseMatrix& operator*=(double s);

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

    std::string shape_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);

// Column permutation record: column j of the permuted matrix is column perm[j] of the original.
using Permutation = std::vector<std::size_t>;

DenseMatrix permute_columns(const DenseMatrix& a, const Permutation& perm);

}  // namespace uzv
