#include "helios/ensemble.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>

#include "helios/errors.hpp"
#include "helios/rng.hpp"

namespace helios::ensemble {

NoisyField add_noise(std::span<const double> values, const NoiseSpec& spec,
                     const spectral::RadialGrid& grid, std::uint64_t stream) {
  if (!std::isfinite(spec.epsilon) || spec.epsilon < 0.0)
    throw DomainError("noise level epsilon must be finite and >= 0");
  if (values.size() != grid.size()) throw DataError("field does not match the radial grid");
  NoisyField out{std::vector<double>(values.begin(), values.end()), 0.0};
  if (spec.epsilon == 0.0) return out;
  rng::Stream draws(spec.seed, rng::kNoiseDomain + stream);
  std::vector<double> diff(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double perturbation = spec.epsilon * values[i] * draws.symmetric_uniform();
    out.values[i] = values[i] + perturbation;
    diff[i] = perturbation;
  }
  out.delta = spectral::weighted_l2_norm(diff, grid);
  return out;
}

EnsembleStats summarize(const Matrix& samples, std::uint64_t seed) {
  const std::size_t p = samples.rows();
  const std::size_t k = samples.cols();
  if (p < 2) throw DomainError("ensemble statistics need at least two paths");
  EnsembleStats stats;
  stats.path_count = p;
  stats.seed = seed;
  stats.mean.assign(k, 0.0);
  for (std::size_t row = 0; row < p; ++row)
    for (std::size_t n = 0; n < k; ++n) stats.mean[n] += samples(row, n);
  for (double& m : stats.mean) m /= static_cast<double>(p);

  stats.cov = Matrix(k, k);
  std::vector<double> centered(k);
  for (std::size_t row = 0; row < p; ++row) {
    for (std::size_t n = 0; n < k; ++n) centered[n] = samples(row, n) - stats.mean[n];
    for (std::size_t m = 0; m < k; ++m)
      for (std::size_t n = m; n < k; ++n) stats.cov(m, n) += centered[m] * centered[n];
  }
  const double scale = 1.0 / static_cast<double>(p - 1);
  for (std::size_t m = 0; m < k; ++m) {
    for (std::size_t n = m; n < k; ++n) {
      stats.cov(m, n) *= scale;
      stats.cov(n, m) = stats.cov(m, n);
    }
  }
  return stats;
}

namespace {

// First failure by path index, so the reported error is thread-count independent.
class FirstFailure {
 public:
  void record(std::size_t index, const std::exception& e) {
#pragma omp critical(helios_first_failure)
    {
      if (!index_ || index < *index_) {
        index_ = index;
        message_ = e.what();
        numeric_ = dynamic_cast<const NumericError*>(&e) != nullptr;
      }
    }
  }

  void rethrow() const {
    if (!index_) return;
    std::ostringstream msg;
    msg << "path " << *index_ << ": " << message_;
    if (numeric_) throw NumericError(msg.str());
    throw DataError(msg.str());
  }

 private:
  std::optional<std::size_t> index_;
  std::string message_;
  bool numeric_ = false;
};

template <bool Parallel>
Matrix sample_modes(const forward::DiffusionProblem& problem, const spectral::RadialGrid& rgrid,
                    const fbm::PathSampler& sampler, const EnsembleConfig& config,
                    double* mean_delta) {
  if (config.paths < 2) throw DomainError("ensemble needs P >= 2 paths");
  if (config.modes == 0) throw DomainError("ensemble needs at least one mode");
  const fbm::TimeGrid& tgrid = sampler.grid();
  const spectral::ModeBasis basis(rgrid, config.modes);

  std::optional<forward::FdSolver> fd;
  std::optional<forward::MildSolver> mild;
  if (config.solver == Solver::fd) {
    fd.emplace(problem, rgrid, tgrid);
  } else {
    std::vector<double> f_nodes(rgrid.size()), g_nodes(rgrid.size());
    for (std::size_t i = 0; i < rgrid.size(); ++i) {
      f_nodes[i] = problem.f(rgrid.node(i));
      g_nodes[i] = problem.g(rgrid.node(i));
    }
    mild.emplace(problem, tgrid, basis.project(f_nodes), basis.project(g_nodes));
  }

  Matrix samples(config.paths, config.modes);
  std::vector<double> deltas(config.paths, 0.0);
  FirstFailure failure;
  const auto total = static_cast<std::ptrdiff_t>(config.paths);

#pragma omp parallel if (Parallel)
  {
    std::vector<double> path(tgrid.size());
    std::vector<double> normals(tgrid.steps());
    std::vector<double> field(rgrid.size());
#pragma omp for schedule(dynamic, 8)
    for (std::ptrdiff_t k = 0; k < total; ++k) {
      const auto index = static_cast<std::size_t>(k);
      try {
        sampler.draw(config.seed, index, path, normals);
        auto row = samples.row(index);
        if (fd) {
          fd->solve_final(path, field);
        } else {
          mild->solve_final(path, row);
        }
        if (config.noise.epsilon > 0.0) {
          if (!fd) {
            spectral::ModalCoefficients c{std::vector<double>(row.begin(), row.end()),
                                          rgrid.radius()};
            field = basis.synthesize(c);
          }
          auto noisy = add_noise(field, config.noise, rgrid, index);
          deltas[index] = noisy.delta;
          field = std::move(noisy.values);
        }
        if (fd || config.noise.epsilon > 0.0) {
          const auto coeffs = basis.project(field);
          std::copy(coeffs.values.begin(), coeffs.values.end(), row.begin());
        }
      } catch (const std::exception& e) {
        failure.record(index, e);
      }
    }
  }
  failure.rethrow();

  if (mean_delta) {
    double acc = 0.0;
    for (double d : deltas) acc += d;
    *mean_delta = acc / static_cast<double>(config.paths);
  }
  return samples;
}

template <bool Parallel>
EnsembleStats run(const forward::DiffusionProblem& problem, const spectral::RadialGrid& rgrid,
                  const fbm::PathSampler& sampler, const EnsembleConfig& config) {
  double mean_delta = 0.0;
  const Matrix samples = sample_modes<Parallel>(problem, rgrid, sampler, config, &mean_delta);
  EnsembleStats stats = summarize(samples, config.seed);
  stats.mean_delta = mean_delta;
  return stats;
}

}  // namespace

Matrix sample_final_modes(const forward::DiffusionProblem& problem,
                          const spectral::RadialGrid& rgrid, const fbm::PathSampler& sampler,
                          const EnsembleConfig& config, double* mean_delta) {
  return sample_modes<true>(problem, rgrid, sampler, config, mean_delta);
}

EnsembleStats run_ensemble(const forward::DiffusionProblem& problem,
                           const spectral::RadialGrid& rgrid, const fbm::PathSampler& sampler,
                           const EnsembleConfig& config) {
  return run<true>(problem, rgrid, sampler, config);
}

EnsembleStats run_ensemble(const forward::DiffusionProblem& problem,
                           const spectral::RadialGrid& rgrid, const fbm::TimeGrid& tgrid,
                           fbm::HurstIndex hurst, const EnsembleConfig& config) {
  return run_ensemble(problem, rgrid, fbm::PathSampler(tgrid, hurst), config);
}

namespace reference {
EnsembleStats run_ensemble(const forward::DiffusionProblem& problem,
                           const spectral::RadialGrid& rgrid, const fbm::PathSampler& sampler,
                           const EnsembleConfig& config) {
  return run<false>(problem, rgrid, sampler, config);
}
}  // namespace reference

StabilityEstimate stability_ratio(const forward::DiffusionProblem& problem,
                                  const spectral::RadialGrid& rgrid, const fbm::TimeGrid& tgrid,
                                  std::size_t paths, fbm::HurstIndex hurst, std::uint64_t seed) {
  if (paths == 0) throw DomainError("stability estimate needs at least one path");
  const forward::FdSolver solver(problem, rgrid, tgrid);
  const spectral::ModeBasis norms(rgrid, 0);

  std::vector<double> f_nodes(rgrid.size()), g_nodes(rgrid.size());
  for (std::size_t i = 0; i < rgrid.size(); ++i) {
    f_nodes[i] = problem.f(rgrid.node(i));
    g_nodes[i] = problem.g(rgrid.node(i));
  }
  const double f_sq = norms.inner(f_nodes, f_nodes);
  const double g_sq = norms.inner(g_nodes, g_nodes);
  const double t = tgrid.t_final();
  const double p = hurst.twice() + 1.0;
  const double h_sup = solver.bounds().h_sup;
  StabilityEstimate out;
  out.bound = t * t * t * f_sq * h_sup * h_sup + std::pow(t, p) / p * g_sq;
  if (!(out.bound > 0.0)) throw DomainError("stability bound is zero (f = g = 0)");

  const fbm::PathSampler sampler(tgrid, hurst);
  std::vector<double> energies(paths, 0.0);
  FirstFailure failure;
  const double dt = tgrid.step();
  const std::size_t last = tgrid.steps();
  const auto total = static_cast<std::ptrdiff_t>(paths);
#pragma omp parallel
  {
    std::vector<double> path(tgrid.size()), normals(tgrid.steps()), field(rgrid.size());
#pragma omp for schedule(dynamic, 8)
    for (std::ptrdiff_t k = 0; k < total; ++k) {
      const auto index = static_cast<std::size_t>(k);
      try {
        sampler.draw(seed, index, path, normals);
        double energy = 0.0;
        solver.solve_final(path, field, [&](std::size_t level, std::span<const double> u) {
          const double weight = (level == 0 || level == last) ? 0.5 : 1.0;
          energy += weight * dt * norms.inner(u, u);
        });
        energies[index] = energy;
      } catch (const std::exception& e) {
        failure.record(index, e);
      }
    }
  }
  failure.rethrow();
  for (double e : energies) out.energy += e;
  out.energy /= static_cast<double>(paths);
  out.ratio = out.energy / out.bound;
  return out;
}

}  // namespace helios::ensemble
