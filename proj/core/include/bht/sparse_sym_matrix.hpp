#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace bht {

/// Real symmetric matrix stored as its diagonal plus the strict upper triangle in CSR form.
///
/// Invariants: no duplicate (row, col), no explicit zeros off the diagonal. Immutable once built;
/// every multiply is a pure read.
class SparseSymMatrix {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };

  /// Incremental builder. Entries given as (i, j) or (j, i) land in the same upper slot and
  /// are summed; off-diagonal sums that cancel to zero are dropped.
  class Builder {
   public:
    explicit Builder(std::size_t dim);
    void add_diagonal(std::size_t i, double value);
    void add(std::size_t i, std::size_t j, double value);
    SparseSymMatrix build() &&;

   private:
    std::size_t dim_;
    std::vector<double> diagonal_;
    std::vector<Entry> upper_;
  };

  SparseSymMatrix() = default;

  std::size_t dim() const noexcept { return diagonal_.size(); }
  /// Stored off-diagonal entries (upper triangle only).
  std::size_t upper_nonzeros() const noexcept { return values_.size(); }

  double diagonal(std::size_t i) const { return diagonal_[i]; }
  /// Element (i, j) of the full matrix; zero when not stored.
  double at(std::size_t i, std::size_t j) const;

  /// y = A x.
  void multiply(std::span<const double> x, std::span<double> y) const;
  void multiply(std::span<const std::complex<double>> x, std::span<std::complex<double>> y) const;

  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
  Eigen::VectorXcd operator*(const Eigen::VectorXcd& x) const;

  /// Max absolute row sum of the full matrix.
  double norm_inf() const;

  Eigen::MatrixXd to_dense() const;

  /// Visits every stored upper entry (row < col) in row-major order.
  template <typename F>
  void for_each_upper(F&& f) const {
    for (std::size_t i = 0; i + 1 < row_ptr_.size(); ++i) {
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) f(i, cols_[k], values_[k]);
    }
  }

 private:
  template <typename T>
  void multiply_impl(std::span<const T> x, std::span<T> y) const;

  std::vector<double> diagonal_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

}  // namespace bht
