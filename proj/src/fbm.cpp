#include "helios/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "helios/errors.hpp"
#include "helios/rng.hpp"

namespace helios::fbm {

HurstIndex::HurstIndex(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    std::ostringstream msg;
    msg << "Hurst index must satisfy 0 < H < 1, got " << value;
    throw DomainError(msg.str());
  }
}

TimeGrid::TimeGrid(double t_final, std::size_t steps) : t_final_(t_final), steps_(steps) {
  if (!(t_final > 0.0) || !std::isfinite(t_final))
    throw DomainError("time grid needs a positive finite final time");
  if (steps == 0) throw DomainError("time grid needs at least one step");
}

double TimeGrid::node(std::size_t k) const {
  if (k == steps_) return t_final_;
  return static_cast<double>(k) * t_final_ / static_cast<double>(steps_);
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = node(k);
  return out;
}

double covariance(double t, double s, HurstIndex hurst) {
  if (t < 0.0 || s < 0.0) throw DomainError("fBm covariance needs non-negative times");
  const double p = hurst.twice();
  return 0.5 * (std::pow(t, p) + std::pow(s, p) - std::pow(std::abs(t - s), p));
}

double increment_covariance(double t, double s, double r, HurstIndex hurst) {
  if (!(0.0 <= r && r < s && s < t))
    throw DomainError("increment covariance needs 0 <= r < s < t");
  const double p = hurst.twice();
  return 0.5 * (std::pow(t - r, p) - std::pow(t - s, p) - std::pow(s - r, p));
}

double increment_lag_covariance(std::size_t lag, double step, HurstIndex hurst) {
  const double p = hurst.twice();
  const double k = static_cast<double>(lag);
  const double below = lag == 0 ? 1.0 : std::pow(k - 1.0, p);
  return 0.5 * std::pow(step, p) * (std::pow(k + 1.0, p) - 2.0 * std::pow(k, p) + below);
}

Matrix covariance_matrix(const TimeGrid& grid, HurstIndex hurst) {
  const std::size_t m = grid.steps();
  Matrix gram(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double value = covariance(grid.node(i + 1), grid.node(j + 1), hurst);
      gram(i, j) = value;
      gram(j, i) = value;
    }
  }
  return gram;
}

PathEnsemble::PathEnsemble(TimeGrid grid, HurstIndex hurst, std::uint64_t seed, Matrix paths)
    : grid_(grid), hurst_(hurst), seed_(seed), paths_(std::move(paths)) {
  if (paths_.cols() != grid_.size())
    throw DataError("path length does not match the time grid");
}

PathSampler::PathSampler(TimeGrid grid, HurstIndex hurst)
    : grid_(grid), hurst_(hurst), gram_(covariance_matrix(grid, hurst)) {
  const std::size_t m = grid_.steps();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < m; ++i) max_diag = std::max(max_diag, gram_(i, i));

  double smallest_eigenvalue = 0.0;
  double jitter = 0.0;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    if (attempt > 0) jitter = 1e-12 * max_diag * std::pow(10.0, attempt - 1);
    factor_ = gram_;
    for (std::size_t i = 0; i < m; ++i) factor_(i, i) += jitter;
    const auto status = linalg::cholesky_inplace(factor_.data(), m);
    if (attempt == 0) smallest_eigenvalue = status.min_eigenvalue;
    if (status.ok) {
      jitter_ = jitter;
      return;
    }
  }
  std::ostringstream msg;
  msg << "fBm covariance not positive definite after jitter (H=" << hurst_.value()
      << ", M=" << m << "); smallest eigenvalue " << smallest_eigenvalue;
  throw NumericError(msg.str());
}

void PathSampler::draw(std::uint64_t seed, std::uint64_t index, std::span<double> out,
                       std::span<double> normals) const {
  const std::size_t m = grid_.steps();
  rng::Stream stream(seed, rng::kPathDomain + index);
  stream.fill_gaussian(normals.first(m));
  out[0] = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = factor_.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += row[j] * normals[j];
    out[i + 1] = acc;
  }
}

namespace {

template <bool Parallel>
PathEnsemble synthesize(const PathSampler& sampler, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw DomainError("path count must be at least 1");
  const TimeGrid& grid = sampler.grid();
  Matrix paths(count, grid.size());
  const auto total = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel if (Parallel)
  {
    std::vector<double> normals(grid.steps());
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < total; ++k) {
      const auto index = static_cast<std::size_t>(k);
      sampler.draw(seed, index, paths.row(index), normals);
    }
  }
  return PathEnsemble(grid, sampler.hurst(), seed, std::move(paths));
}

}  // namespace

PathEnsemble sample_paths(const PathSampler& sampler, std::size_t count, std::uint64_t seed) {
  return synthesize<true>(sampler, count, seed);
}

PathEnsemble sample_paths(const TimeGrid& grid, HurstIndex hurst, std::size_t count,
                          std::uint64_t seed) {
  return sample_paths(PathSampler(grid, hurst), count, seed);
}

Matrix increments(const PathEnsemble& ensemble) {
  const std::size_t m = ensemble.grid().steps();
  Matrix out(ensemble.count(), m);
  for (std::size_t k = 0; k < ensemble.count(); ++k) {
    const auto path = ensemble.path(k);
    auto row = out.row(k);
    for (std::size_t j = 0; j < m; ++j) row[j] = path[j + 1] - path[j];
  }
  return out;
}

namespace reference {
PathEnsemble sample_paths(const PathSampler& sampler, std::size_t count, std::uint64_t seed) {
  return synthesize<false>(sampler, count, seed);
}
}  // namespace reference

}  // namespace helios::fbm
