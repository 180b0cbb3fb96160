#include "bht/sparse_sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bht/errors.hpp"

namespace bht {

SparseSymMatrix::Builder::Builder(std::size_t dim) : dim_(dim), diagonal_(dim, 0.0) {}

void SparseSymMatrix::Builder::add_diagonal(std::size_t i, double value) {
  if (i >= dim_) throw DimensionMismatch("SparseSymMatrix: diagonal index out of range");
  diagonal_[i] += value;
}

void SparseSymMatrix::Builder::add(std::size_t i, std::size_t j, double value) {
  if (i >= dim_ || j >= dim_) throw DimensionMismatch("SparseSymMatrix: entry index out of range");
  if (i == j) {
    diagonal_[i] += value;
    return;
  }
  upper_.push_back({std::min(i, j), std::max(i, j), value});
}

SparseSymMatrix SparseSymMatrix::Builder::build() && {
  std::sort(upper_.begin(), upper_.end(),
            [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });

  SparseSymMatrix m;
  m.diagonal_ = std::move(diagonal_);
  m.row_ptr_.assign(dim_ + 1, 0);
  m.cols_.reserve(upper_.size());
  m.values_.reserve(upper_.size());

  for (std::size_t k = 0; k < upper_.size();) {
    const std::size_t r = upper_[k].row;
    const std::size_t c = upper_[k].col;
    double v = 0.0;
    for (; k < upper_.size() && upper_[k].row == r && upper_[k].col == c; ++k) v += upper_[k].value;
    if (v == 0.0) continue;
    m.cols_.push_back(c);
    m.values_.push_back(v);
    ++m.row_ptr_[r + 1];
  }
  for (std::size_t i = 0; i < dim_; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
  upper_.clear();
  return m;
}

double SparseSymMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= dim() || j >= dim()) throw DimensionMismatch("SparseSymMatrix::at: index out of range");
  if (i == j) return diagonal_[i];
  if (i > j) std::swap(i, j);
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

template <typename T>
void SparseSymMatrix::multiply_impl(std::span<const T> x, std::span<T> y) const {
  const std::size_t n = dim();
  if (x.size() != n || y.size() != n) {
    throw DimensionMismatch("SparseSymMatrix::multiply: vector length " + std::to_string(x.size()) +
                            " vs dimension " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) y[i] = diagonal_[i] * x[i];
  for (std::size_t i = 0; i < n; ++i) {
    T acc = y[i];
    const T xi = x[i];
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t j = cols_[k];
      const double v = values_[k];
      acc += v * x[j];
      y[j] += v * xi;
    }
    y[i] = acc;
  }
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y) const { multiply_impl(x, y); }

void SparseSymMatrix::multiply(std::span<const std::complex<double>> x, std::span<std::complex<double>> y) const {
  multiply_impl(x, y);
}

Eigen::VectorXd SparseSymMatrix::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  multiply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
           std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
  return y;
}

Eigen::VectorXcd SparseSymMatrix::operator*(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd y(x.size());
  multiply(std::span<const std::complex<double>>(x.data(), static_cast<std::size_t>(x.size())),
           std::span<std::complex<double>>(y.data(), static_cast<std::size_t>(y.size())));
  return y;
}

double SparseSymMatrix::norm_inf() const {
  std::vector<double> rows(dim(), 0.0);
  for (std::size_t i = 0; i < dim(); ++i) rows[i] = std::abs(diagonal_[i]);
  for_each_upper([&](std::size_t i, std::size_t j, double v) {
    rows[i] += std::abs(v);
    rows[j] += std::abs(v);
  });
  return rows.empty() ? 0.0 : *std::max_element(rows.begin(), rows.end());
}

Eigen::MatrixXd SparseSymMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = diagonal_[static_cast<std::size_t>(i)];
  for_each_upper([&](std::size_t i, std::size_t j, double v) {
    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
  });
  return a;
}

}  // namespace bht
