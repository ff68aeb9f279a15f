#include "helios/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace helios::linalg {

CholeskyStatus cholesky_inplace(std::span<double> a, std::size_t n) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::Map<RowMajor> m(a.data(), size, size);
  const Eigen::LLT<RowMajor> llt(m);
  if (llt.info() != Eigen::Success) {
    const Eigen::SelfAdjointEigenSolver<RowMajor> eig(m, Eigen::EigenvaluesOnly);
    return {false, eig.eigenvalues().minCoeff()};
  }
  m = llt.matrixL();
  return {};
}

bool solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> sup, std::span<double> rhs,
                       std::span<double> scratch) {
  const std::size_t n = diag.size();
  if (n == 0) return true;
  double denom = diag[0];
  if (denom == 0.0) return false;
  scratch[0] = sup[0] / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - sub[i] * scratch[i - 1];
    if (denom == 0.0) return false;
    scratch[i] = (i + 1 < n) ? sup[i] / denom : 0.0;
    rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
  return true;
}

}  // namespace helios::linalg
