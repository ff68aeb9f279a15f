#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "helios/linalg.hpp"

namespace helios::fbm {

/// Hurst index H, strictly inside (0, 1).
class HurstIndex {
 public:
  explicit HurstIndex(double value);
  double value() const { return value_; }
  double twice() const { return 2.0 * value_; }

 private:
  double value_;
};

/// Uniform grid t_k = k * t_final / M, k = 0..M.
class TimeGrid {
 public:
  TimeGrid(double t_final, std::size_t steps);

  double t_final() const { return t_final_; }
  std::size_t steps() const { return steps_; }
  std::size_t size() const { return steps_ + 1; }
  double step() const { return t_final_ / static_cast<double>(steps_); }
  /// Exact at both ends: node(0) == 0, node(M) == t_final.
  double node(std::size_t k) const;
  std::vector<double> nodes() const;

 private:
  double t_final_;
  std::size_t steps_;
};

/// R(t, s) = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2.
double covariance(double t, double s, HurstIndex hurst);

/// E[(B(t) - B(s)) (B(s) - B(r))] for 0 <= r < s < t.
double increment_covariance(double t, double s, double r, HurstIndex hurst);

/// E[dB_i dB_{i+lag}] for increments of width `step`:
/// step^{2H} (|lag+1|^{2H} - 2 lag^{2H} + |lag-1|^{2H}) / 2.
double increment_lag_covariance(std::size_t lag, double step, HurstIndex hurst);

/// Gram matrix [R(t_i, t_j)] over nodes t_1..t_M (row-major M x M).
Matrix covariance_matrix(const TimeGrid& grid, HurstIndex hurst);

/// Immutable set of fBm sample paths on a TimeGrid.
class PathEnsemble {
 public:
  PathEnsemble(TimeGrid grid, HurstIndex hurst, std::uint64_t seed, Matrix paths);

  const TimeGrid& grid() const { return grid_; }
  HurstIndex hurst() const { return hurst_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t count() const { return paths_.rows(); }
  std::span<const double> path(std::size_t k) const { return paths_.row(k); }
  const Matrix& values() const { return paths_; }

 private:
  TimeGrid grid_;
  HurstIndex hurst_;
  std::uint64_t seed_;
  Matrix paths_;
};

/**
 * Exact fBm synthesis by Cholesky factorization of the node covariance.
 *
 * The factor is computed once and shared by every path. Path k of seed s is
 * drawn from rng stream (s, k), so any subset of paths can be regenerated
 * independently and in any order.
 *
 * If the Gram matrix is numerically indefinite the diagonal is lifted by
 * 1e-12 * max(diag), then 1e-11, 1e-10 before giving up with NumericError.
 */
class PathSampler {
 public:
  PathSampler(TimeGrid grid, HurstIndex hurst);

  const TimeGrid& grid() const { return grid_; }
  HurstIndex hurst() const { return hurst_; }
  /// The matrix handed to the factorization, before any jitter.
  const Matrix& gram() const { return gram_; }
  /// Lower triangular factor L with L L^T = gram + jitter * I.
  const Matrix& factor() const { return factor_; }
  double jitter() const { return jitter_; }

  /// Writes B^H(t_0..t_M) for path `index` into `out` (size M + 1).
  void draw(std::uint64_t seed, std::uint64_t index, std::span<double> out,
            std::span<double> normals) const;

 private:
  TimeGrid grid_;
  HurstIndex hurst_;
  Matrix gram_;
  Matrix factor_;
  double jitter_ = 0.0;
};

PathEnsemble sample_paths(const TimeGrid& grid, HurstIndex hurst, std::size_t count,
                          std::uint64_t seed);
PathEnsemble sample_paths(const PathSampler& sampler, std::size_t count, std::uint64_t seed);

/// Row k holds B(t_{j+1}) - B(t_j), j = 0..M-1.
Matrix increments(const PathEnsemble& ensemble);

namespace reference {
PathEnsemble sample_paths(const PathSampler& sampler, std::size_t count, std::uint64_t seed);
}

}  // namespace helios::fbm
