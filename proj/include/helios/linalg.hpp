#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace helios {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

namespace linalg {

struct CholeskyStatus {
  bool ok = true;
  /// Smallest eigenvalue of the input; only computed when the factorization fails.
  double min_eigenvalue = 0.0;
};

/// In-place lower Cholesky factorization (Eigen LLT) of a symmetric n x n
/// row-major matrix. On success the strict upper triangle is zeroed; on
/// failure `a` is left unchanged.
CholeskyStatus cholesky_inplace(std::span<double> a, std::size_t n);

/// Solves a tridiagonal system with the Thomas algorithm.
/// `sub[i]` multiplies x[i-1] and `sup[i]` multiplies x[i+1]; sub[0] and
/// sup[n-1] are ignored. `rhs` is overwritten with the solution. Returns false
/// on a zero pivot.
bool solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> sup, std::span<double> rhs,
                       std::span<double> scratch);

}  // namespace linalg
}  // namespace helios
