#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "helios/linalg.hpp"

namespace helios::spectral {

/// Radial nodes r_i = i * R0 / N, i = 0..N.
class RadialGrid {
 public:
  RadialGrid(double radius, std::size_t intervals);

  double radius() const { return radius_; }
  std::size_t intervals() const { return intervals_; }
  std::size_t size() const { return intervals_ + 1; }
  double step() const { return radius_ / static_cast<double>(intervals_); }
  double node(std::size_t i) const;
  std::vector<double> nodes() const;

 private:
  double radius_;
  std::size_t intervals_;
};

/// sin(x)/x with the removable singularity filled by 1 - x^2/6 + x^4/120 for |x| < 1e-8.
double sinc(double x);

/// lambda_n = (n pi / R0)^2.
double eigenvalue(std::size_t n, double radius);

/// omega_n(r) = sqrt(2) n pi / sqrt(R0^3) * sinc(n pi r / R0), orthonormal under r^2 dr.
double eigenfunction(std::size_t n, double radius, double r);

/// Composite Simpson weights for `intervals` (even) equal panels of width `step`.
std::vector<double> simpson_weights(std::size_t intervals, double step);

/// Coefficients c_n, n = 1..K, stored at index n - 1.
struct ModalCoefficients {
  std::vector<double> values;
  double basis_radius = 0.0;

  std::size_t size() const { return values.size(); }
  double coefficient(std::size_t n) const { return values.at(n - 1); }
};

/**
 * Eigenfunctions omega_1..omega_K sampled on a RadialGrid, together with the
 * r^2-weighted Simpson rule used for every radial integral.
 *
 * Simpson resolves omega_n well while K <= N / 3; past that the caller is
 * expected to warn (see exceeds_mode_ceiling).
 */
class ModeBasis {
 public:
  ModeBasis(RadialGrid grid, std::size_t modes);

  const RadialGrid& grid() const { return grid_; }
  std::size_t modes() const { return modes_; }
  /// omega_n on the grid, 1 <= n <= modes().
  std::span<const double> mode(std::size_t n) const { return values_.row(n - 1); }
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  /// r_i^2 times the Simpson weight at node i.
  std::span<const double> weights() const { return weights_; }

  double inner(std::span<const double> a, std::span<const double> b) const;
  double norm(std::span<const double> values) const;

  ModalCoefficients project(std::span<const double> values) const;
  std::vector<double> synthesize(const ModalCoefficients& coeffs) const;
  /// sum_{m,n} P_mn omega_m omega_n; P must be symmetric within 1e-8.
  std::vector<double> synthesize_squared(const Matrix& products) const;
  /// (sum_n g_n omega_n)^2 via the rank-one product matrix.
  std::vector<double> synthesize_squared(const ModalCoefficients& coeffs) const;

 private:
  RadialGrid grid_;
  std::size_t modes_;
  Matrix values_;
  std::vector<double> eigenvalues_;
  std::vector<double> weights_;
};

bool exceeds_mode_ceiling(const RadialGrid& grid, std::size_t modes);

ModalCoefficients project(std::span<const double> values, const RadialGrid& grid,
                          std::size_t modes);
std::vector<double> synthesize(const ModalCoefficients& coeffs, const RadialGrid& grid);
std::vector<double> synthesize_squared(const Matrix& products, const RadialGrid& grid);
std::vector<double> synthesize_squared(const ModalCoefficients& coeffs, const RadialGrid& grid);
double weighted_l2_norm(std::span<const double> values, const RadialGrid& grid);

}  // namespace helios::spectral
