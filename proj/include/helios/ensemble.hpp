#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "helios/fbm.hpp"
#include "helios/forward.hpp"
#include "helios/linalg.hpp"
#include "helios/spectral.hpp"

namespace helios::ensemble {

enum class Solver { fd, mild };

/// Multiplicative measurement noise u -> u (1 + epsilon xi), xi ~ U(-1, 1) i.i.d. per node.
struct NoiseSpec {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

struct NoisyField {
  std::vector<double> values;
  /// delta = ||u_noisy - u|| in the r^2-weighted norm.
  double delta = 0.0;
};

/// Perturbs a final-time field. `stream` selects an independent draw for the same seed.
NoisyField add_noise(std::span<const double> values, const NoiseSpec& spec,
                     const spectral::RadialGrid& grid, std::uint64_t stream = 0);

struct EnsembleConfig {
  std::size_t paths = 1000;
  std::size_t modes = 30;
  Solver solver = Solver::fd;
  NoiseSpec noise;
  std::uint64_t seed = 1;
};

/// Sample statistics of u_n(T), n = 1..N1, over P paths.
struct EnsembleStats {
  std::vector<double> mean;
  Matrix cov;  // unbiased, divisor P - 1
  std::size_t path_count = 0;
  std::uint64_t seed = 0;
  /// Average noise norm delta over paths (0 when epsilon = 0).
  double mean_delta = 0.0;

  std::size_t modes() const { return mean.size(); }
  double variance(std::size_t n) const { return cov(n - 1, n - 1); }
};

/// Mean and unbiased covariance of the rows of `samples` (P x N1), reduced in row order.
EnsembleStats summarize(const Matrix& samples, std::uint64_t seed);

/**
 * Monte-Carlo statistics of final-time modal data.
 *
 * Paths are solved concurrently; per-path results land in fixed slots and are
 * reduced in path order, so the statistics do not depend on the thread count.
 */
EnsembleStats run_ensemble(const forward::DiffusionProblem& problem,
                           const spectral::RadialGrid& rgrid, const fbm::PathSampler& sampler,
                           const EnsembleConfig& config);
EnsembleStats run_ensemble(const forward::DiffusionProblem& problem,
                           const spectral::RadialGrid& rgrid, const fbm::TimeGrid& tgrid,
                           fbm::HurstIndex hurst, const EnsembleConfig& config);

/// Per-path modal samples behind run_ensemble (P x N1).
Matrix sample_final_modes(const forward::DiffusionProblem& problem,
                          const spectral::RadialGrid& rgrid, const fbm::PathSampler& sampler,
                          const EnsembleConfig& config, double* mean_delta = nullptr);

struct StabilityEstimate {
  double energy = 0.0;  // Monte-Carlo E ||u||^2 over D x [0, T]
  double bound = 0.0;   // T^3 ||f||^2 ||h||_inf^2 + T^{2H+1}/(2H+1) ||g||^2
  double ratio = 0.0;
};

/// Energy of the FD solution against the a-priori bound. f = g = 0 is rejected.
StabilityEstimate stability_ratio(const forward::DiffusionProblem& problem,
                                  const spectral::RadialGrid& rgrid, const fbm::TimeGrid& tgrid,
                                  std::size_t paths, fbm::HurstIndex hurst, std::uint64_t seed);

namespace reference {
EnsembleStats run_ensemble(const forward::DiffusionProblem& problem,
                           const spectral::RadialGrid& rgrid, const fbm::PathSampler& sampler,
                           const EnsembleConfig& config);
}

}  // namespace helios::ensemble
