#include "helios/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "helios/errors.hpp"
#include "helios/rng.hpp"

namespace helios::inverse {

const char* to_string(KernelMethod method) {
  return method == KernelMethod::quadrature ? "quadrature" : "monte-carlo";
}

namespace {

void check_problem(const KernelProblem& problem) {
  if (!problem.a || !problem.h) throw DomainError("kernel problem has an unset a(t) or h(t)");
  if (!(problem.radius > 0.0) || !(problem.t_final > 0.0))
    throw DomainError("kernel problem needs R0 > 0 and T > 0");
}

void check_even(std::size_t steps, const char* what) {
  if (steps == 0 || steps % 2 != 0) {
    std::ostringstream msg;
    msg << what << " must be a positive even number, got " << steps;
    throw ConfigError(msg.str());
  }
}

double source_kernel_on(double lambda, const KernelProblem& problem,
                        const forward::CumulativeIntegral& cumulative) {
  const fbm::TimeGrid& grid = cumulative.grid();
  const auto weights = spectral::simpson_weights(grid.steps(), grid.step());
  const double end = cumulative.at_node(grid.steps());
  double acc = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    acc += weights[k] * problem.h(grid.node(k)) * std::exp(-lambda * (end - cumulative.at_node(k)));
  return acc;
}

std::vector<double> eigenvalues_of(std::span<const std::size_t> ns, double radius) {
  std::vector<double> out(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) out[i] = spectral::eigenvalue(ns[i], radius);
  return out;
}

struct NoiseBlock {
  Matrix value;
  Matrix std_error;
  KernelMethod method = KernelMethod::quadrature;
};

// Brownian case: Ito isometry, one Simpson sum per pair.
template <bool Parallel>
NoiseBlock ito_block(std::span<const double> lambdas, const KernelProblem& problem,
                     const KernelConfig& config) {
  check_even(config.quad_steps, "kernel quad_steps");
  const fbm::TimeGrid grid(problem.t_final, config.quad_steps);
  const forward::CumulativeIntegral cumulative(problem.a, grid);
  const auto weights = spectral::simpson_weights(grid.steps(), grid.step());
  const double end = cumulative.at_node(grid.steps());
  std::vector<double> remaining(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) remaining[k] = end - cumulative.at_node(k);

  const std::size_t count = lambdas.size();
  NoiseBlock block{Matrix(count, count), Matrix(count, count), KernelMethod::quadrature};
  const auto total = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (std::ptrdiff_t mi = 0; mi < total; ++mi) {
    const auto m = static_cast<std::size_t>(mi);
    for (std::size_t n = m; n < count; ++n) {
      const double rate = lambdas[m] + lambdas[n];
      double acc = 0.0;
      for (std::size_t k = 0; k < grid.size(); ++k) acc += weights[k] * std::exp(-rate * remaining[k]);
      block.value(m, n) = acc;
      block.value(n, m) = acc;
    }
  }
  return block;
}

// phi_n at the midpoints of `cells` uniform cells on [0, T]; row per mode.
Matrix midpoint_integrands(std::span<const double> lambdas, const KernelProblem& problem,
                           std::size_t cells) {
  const fbm::TimeGrid grid(problem.t_final, cells);
  const forward::CumulativeIntegral cumulative(problem.a, grid);
  const double end = cumulative.at_node(cells);
  std::vector<double> remaining(cells);
  for (std::size_t k = 0; k < cells; ++k)
    remaining[k] = end - cumulative(0.5 * (grid.node(k) + grid.node(k + 1)));
  Matrix phi(lambdas.size(), cells);
  for (std::size_t n = 0; n < lambdas.size(); ++n)
    for (std::size_t k = 0; k < cells; ++k) phi(n, k) = std::exp(-lambdas[n] * remaining[k]);
  return phi;
}

// Long-memory case. alpha_H times the exact integral of |r - u|^{2H-2} over
// cell i x cell j equals the fBm increment covariance at lag |i - j|, so the
// weights are a symmetric Toeplitz matrix.
template <bool Parallel>
NoiseBlock long_memory_block(std::span<const double> lambdas, fbm::HurstIndex hurst,
                             const KernelProblem& problem, const KernelConfig& config) {
  const std::size_t cells = config.cells;
  if (cells == 0) throw ConfigError("kernel cells must be positive");
  const double width = problem.t_final / static_cast<double>(cells);
  const Matrix phi = midpoint_integrands(lambdas, problem, cells);
  std::vector<double> lag(cells);
  for (std::size_t k = 0; k < cells; ++k) lag[k] = fbm::increment_lag_covariance(k, width, hurst);

  const std::size_t count = lambdas.size();
  Matrix weighted(count, cells);  // (Gamma phi_n)_i
  const auto total = static_cast<std::ptrdiff_t>(cells);
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t ii = 0; ii < total; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t n = 0; n < count; ++n) {
      const auto row = phi.row(n);
      double acc = 0.0;
      for (std::size_t j = 0; j < cells; ++j) acc += lag[i > j ? i - j : j - i] * row[j];
      weighted(n, i) = acc;
    }
  }
  NoiseBlock block{Matrix(count, count), Matrix(count, count), KernelMethod::quadrature};
  for (std::size_t m = 0; m < count; ++m) {
    for (std::size_t n = m; n < count; ++n) {
      const double value = std::inner_product(phi.row(m).begin(), phi.row(m).end(),
                                              weighted.row(n).begin(), 0.0);
      block.value(m, n) = value;
      block.value(n, m) = value;
    }
  }
  return block;
}

// Short-memory case. With B = L z on t_1..t_M, the midpoint sum
// X_n = sum_k phi_n(mid_k) (B_{k+1} - B_k) is linear in z: X_n = G_n . z where
// G_n = L^T w_n and w_n[j] = phi_n(mid_{j-1}) - phi_n(mid_j), phi(mid_M) = 0.
// Each sample draws z from stream (mc_seed, kernel domain + sample index).
template <bool Parallel>
NoiseBlock monte_carlo_block(std::span<const double> lambdas, fbm::HurstIndex hurst,
                             const KernelProblem& problem, const KernelConfig& config) {
  const std::size_t steps = config.mc_steps;
  const std::size_t samples = config.mc_paths;
  if (steps == 0) throw ConfigError("kernel mc_steps must be positive");
  if (samples < 2) throw ConfigError("kernel mc_paths must be at least 2");
  const fbm::PathSampler sampler(fbm::TimeGrid(problem.t_final, steps), hurst);
  const Matrix& factor = sampler.factor();
  const Matrix phi = midpoint_integrands(lambdas, problem, steps);
  const std::size_t count = lambdas.size();

  Matrix loading(count, steps);
  const auto n_modes = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t nn = 0; nn < n_modes; ++nn) {
    const auto n = static_cast<std::size_t>(nn);
    const auto row = phi.row(n);
    auto g = loading.row(n);
    for (std::size_t j = 0; j < steps; ++j) {
      const double w = row[j] - (j + 1 < steps ? row[j + 1] : 0.0);
      const auto l = factor.row(j);
      for (std::size_t i = 0; i <= j; ++i) g[i] += w * l[i];
    }
  }

  Matrix integrals(samples, count);
  const auto total = static_cast<std::ptrdiff_t>(samples);
#pragma omp parallel if (Parallel)
  {
    std::vector<double> z(steps);
#pragma omp for schedule(static)
    for (std::ptrdiff_t s = 0; s < total; ++s) {
      const auto index = static_cast<std::size_t>(s);
      rng::Stream stream(config.mc_seed, rng::kKernelDomain + index);
      stream.fill_gaussian(z);
      auto out = integrals.row(index);
      for (std::size_t n = 0; n < count; ++n)
        out[n] = std::inner_product(z.begin(), z.end(), loading.row(n).begin(), 0.0);
    }
  }

  NoiseBlock block{Matrix(count, count), Matrix(count, count), KernelMethod::monte_carlo};
  const double k = static_cast<double>(samples);
  for (std::size_t m = 0; m < count; ++m) {
    for (std::size_t n = m; n < count; ++n) {
      double sum = 0.0;
      double sum_sq = 0.0;
      for (std::size_t s = 0; s < samples; ++s) {
        const double product = integrals(s, m) * integrals(s, n);
        sum += product;
        sum_sq += product * product;
      }
      const double mean = sum / k;
      const double var = std::max(0.0, (sum_sq - k * mean * mean) / (k - 1.0));
      const double se = std::sqrt(var / k);
      block.value(m, n) = block.value(n, m) = mean;
      block.std_error(m, n) = block.std_error(n, m) = se;
    }
  }
  return block;
}

template <bool Parallel>
NoiseBlock noise_block(std::span<const std::size_t> ns, fbm::HurstIndex hurst,
                       const KernelProblem& problem, const KernelConfig& config) {
  check_problem(problem);
  const auto lambdas = eigenvalues_of(ns, problem.radius);
  if (hurst.value() == 0.5) return ito_block<Parallel>(lambdas, problem, config);
  if (hurst.value() > 0.5) return long_memory_block<Parallel>(lambdas, hurst, problem, config);
  return monte_carlo_block<Parallel>(lambdas, hurst, problem, config);
}

template <bool Parallel>
KernelTable build_table(const KernelProblem& problem, fbm::HurstIndex hurst, std::size_t modes,
                        const KernelConfig& config) {
  check_problem(problem);
  if (modes == 0) throw DomainError("kernel table needs at least one mode");
  check_even(config.quad_steps, "kernel quad_steps");
  KernelTable table;
  table.hurst = hurst;
  const fbm::TimeGrid grid(problem.t_final, config.quad_steps);
  const forward::CumulativeIntegral cumulative(problem.a, grid);
  table.source.resize(modes);
  for (std::size_t n = 1; n <= modes; ++n) {
    const double value = source_kernel_on(spectral::eigenvalue(n, problem.radius), problem, cumulative);
    if (!(value > 0.0)) {
      std::ostringstream msg;
      msg << "source kernel I_" << n << " = " << value << " is not positive";
      throw NumericError(msg.str());
    }
    table.source[n - 1] = value;
  }
  std::vector<std::size_t> ns(modes);
  std::iota(ns.begin(), ns.end(), std::size_t{1});
  NoiseBlock block = noise_block<Parallel>(ns, hurst, problem, config);
  table.method = block.method;
  table.noise = std::move(block.value);
  table.noise_std_error = std::move(block.std_error);
  if (table.method == KernelMethod::monte_carlo) {
    for (std::size_t m = 0; m < modes; ++m)
      for (std::size_t n = m; n < modes; ++n)
        if (table.noise_std_error(m, n) > config.mc_rel_tolerance * std::abs(table.noise(m, n)))
          table.warnings.emplace_back(m + 1, n + 1);
  }
  return table;
}

}  // namespace

double source_kernel(std::size_t n, const KernelProblem& problem, std::size_t quad_steps) {
  check_problem(problem);
  check_even(quad_steps, "kernel quad_steps");
  const fbm::TimeGrid grid(problem.t_final, quad_steps);
  const forward::CumulativeIntegral cumulative(problem.a, grid);
  const double value = source_kernel_on(spectral::eigenvalue(n, problem.radius), problem, cumulative);
  if (!(value > 0.0)) {
    std::ostringstream msg;
    msg << "source kernel I_" << n << " = " << value << " is not positive";
    throw NumericError(msg.str());
  }
  return value;
}

KernelEntry noise_kernel(std::size_t m, std::size_t n, fbm::HurstIndex hurst,
                         const KernelProblem& problem, const KernelConfig& config) {
  const std::size_t ns[] = {std::min(m, n), std::max(m, n)};
  const NoiseBlock block = noise_block<true>(ns, hurst, problem, config);
  KernelEntry entry{block.value(0, 1), block.std_error(0, 1), block.method, false};
  entry.warning = block.method == KernelMethod::monte_carlo &&
                  entry.std_error > config.mc_rel_tolerance * std::abs(entry.value);
  return entry;
}

KernelTable build_kernel_table(const KernelProblem& problem, fbm::HurstIndex hurst,
                               std::size_t modes, const KernelConfig& config) {
  return build_table<true>(problem, hurst, modes, config);
}

namespace reference {
KernelTable build_kernel_table(const KernelProblem& problem, fbm::HurstIndex hurst,
                               std::size_t modes, const KernelConfig& config) {
  return build_table<false>(problem, hurst, modes, config);
}
}  // namespace reference

Reconstruction reconstruct(const ensemble::EnsembleStats& stats, const KernelTable& kernels,
                           std::size_t truncation, const spectral::RadialGrid& grid) {
  if (truncation == 0) throw DomainError("truncation level must be at least 1");
  if (stats.modes() < truncation || kernels.modes() < truncation)
    throw DataError("statistics or kernels do not cover the truncation level");
  Reconstruction out;
  out.truncation = truncation;
  out.f_coeffs = {std::vector<double>(truncation), grid.radius()};
  for (std::size_t n = 0; n < truncation; ++n) {
    const double kernel = kernels.source[n];
    if (!(kernel > 0.0)) throw DataError("source kernel must be positive");
    out.f_coeffs.values[n] = stats.mean[n] / kernel;
  }
  Matrix raw(truncation, truncation);
  for (std::size_t m = 0; m < truncation; ++m) {
    for (std::size_t n = 0; n < truncation; ++n) {
      const double kernel = kernels.noise(m, n);
      if (!std::isfinite(kernel)) throw DataError("noise kernel entry is not finite");
      if (std::abs(kernel) < kKernelFloor) {
        if (m <= n) out.skipped.emplace_back(m + 1, n + 1);
        continue;
      }
      raw(m, n) = stats.cov(m, n) / kernel;
    }
  }
  out.g_products = Matrix(truncation, truncation);
  for (std::size_t m = 0; m < truncation; ++m)
    for (std::size_t n = 0; n < truncation; ++n)
      out.g_products(m, n) = 0.5 * (raw(m, n) + raw(n, m));

  const spectral::ModeBasis basis(grid, truncation);
  out.f_values = basis.synthesize(out.f_coeffs);
  out.g_squared_values = basis.synthesize_squared(out.g_products);
  return out;
}

double relative_error(std::span<const double> recon, std::span<const double> truth,
                      const spectral::RadialGrid& grid) {
  if (recon.size() != truth.size()) throw DataError("reconstruction and truth differ in size");
  std::vector<double> diff(recon.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = recon[i] - truth[i];
  const double num = spectral::weighted_l2_norm(diff, grid);
  const double den = spectral::weighted_l2_norm(truth, grid);
  return den > 0.0 ? num / den : num;
}

void score(Reconstruction& recon, std::span<const double> f_truth,
           std::span<const double> g_squared_truth, const spectral::RadialGrid& grid) {
  recon.f_error = relative_error(recon.f_values, f_truth, grid);
  recon.g_squared_error = relative_error(recon.g_squared_values, g_squared_truth, grid);
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DataError("slope fit needs two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

DecayProbe decay_probe(std::size_t n_first, std::size_t n_last, fbm::HurstIndex hurst,
                       const KernelProblem& problem, const KernelConfig& config) {
  if (n_first == 0 || n_last <= n_first) throw DomainError("decay probe needs 1 <= n_first < n_last");
  check_problem(problem);
  check_even(config.quad_steps, "kernel quad_steps");
  DecayProbe probe;
  for (std::size_t n = n_first; n <= n_last; ++n) probe.n.push_back(n);
  probe.lambda = eigenvalues_of(probe.n, problem.radius);

  const fbm::TimeGrid grid(problem.t_final, config.quad_steps);
  const forward::CumulativeIntegral cumulative(problem.a, grid);
  for (double lambda : probe.lambda) probe.source.push_back(source_kernel_on(lambda, problem, cumulative));

  const NoiseBlock block = noise_block<true>(probe.n, hurst, problem, config);
  for (std::size_t i = 0; i < probe.n.size(); ++i) probe.noise.push_back(block.value(i, i));

  std::vector<double> log_lambda, log_source, log_noise;
  for (std::size_t i = 0; i < probe.n.size(); ++i) {
    log_lambda.push_back(std::log(probe.lambda[i]));
    log_source.push_back(std::log(std::abs(probe.source[i])));
    log_noise.push_back(std::log(std::abs(probe.noise[i])));
  }
  probe.source_slope = fit_slope(log_lambda, log_source);
  probe.noise_slope = fit_slope(log_lambda, log_noise);
  return probe;
}

}  // namespace helios::inverse
