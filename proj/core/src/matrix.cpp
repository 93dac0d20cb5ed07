#include "uzv/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "uzv/error.hpp"

namespace uzv {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw DimensionError("DenseMatrix: data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_string());
    }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("DenseMatrix: ragged initializer list");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> values) {
    return diagonal(values, values.size(), values.size());
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> values, std::size_t rows, std::size_t cols) {
    DenseMatrix m(rows, cols);
    const std::size_t n = std::min({values.size(), rows, cols});
    for (std::size_t i = 0; i < n; ++i) m(i, i) = values[i];
    return m;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    // blocked to keep both sides cache friendly
    constexpr std::size_t bs = 32;
    for (std::size_t i0 = 0; i0 < rows_; i0 += bs) {
        const std::size_t i1 = std::min(rows_, i0 + bs);
        for (std::size_t j0 = 0; j0 < cols_; j0 += bs) {
            const std::size_t j1 = std::min(cols_, j0 + bs);
            for (std::size_t i = i0; i < i1; ++i)
                for (std::size_t j = j0; j < j1; ++j) t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

DenseMatrix DenseMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) {
        throw DimensionError("block (" + std::to_string(r0) + "," + std::to_string(c0) + ") of size " +
                             std::to_string(nr) + "x" + std::to_string(nc) + " exceeds " + shape_string());
    }
    DenseMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>((r0 + i) * cols_ + c0), nc, b.row(i).begin());
    return b;
}

std::vector<double> DenseMatrix::diag() const {
    const std::size_t n = std::min(rows_, cols_);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = (*this)(i, i);
    return d;
}

double DenseMatrix::frobenius_norm() const {
    // scaled sum of squares, immune to overflow for large entries
    double scale = 0.0, ssq = 1.0;
    for (double x : data_) {
        if (x == 0.0) continue;
        const double ax = std::fabs(x);
        if (scale < ax) {
            ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
            scale = ax;
        } else {
            ssq += (ax / scale) * (ax / scale);
        }
    }
    return scale * std::sqrt(ssq);
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::fabs(x));
    return m;
}

bool DenseMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

static void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " + b.shape_string());
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& o) {
    require_same_shape(*this, o, "operator+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& o) {
    require_same_shape(*this, o, "operator-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

std::string DenseMatrix::shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

DenseMatrix permute_columns(const DenseMatrix& a, const Permutation& perm) {
    if (perm.size() != a.cols())
        throw DimensionError("permute_columns: permutation of length " + std::to_string(perm.size()) +
                             " for " + a.shape_string());
    DenseMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, perm[j]);
    return out;
}

}  // namespace uzv
