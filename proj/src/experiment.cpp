#include "helios/experiment.hpp"

#include <ostream>

#include "helios/csv.hpp"
#include "helios/errors.hpp"

namespace helios::cli {

namespace {

spectral::RadialGrid radial_grid(const ExperimentConfig& c) {
  return {c.radius, c.radial_intervals};
}

fbm::TimeGrid time_grid(const ExperimentConfig& c) { return {c.t_final, c.time_steps}; }

std::vector<double> sample(const std::function<double(double)>& fn,
                           const spectral::RadialGrid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = fn(grid.node(i));
  return out;
}

ensemble::EnsembleConfig ensemble_config(const ExperimentConfig& c, std::uint64_t seed) {
  ensemble::EnsembleConfig e;
  e.paths = c.paths;
  e.modes = c.modes;
  e.solver = c.solver;
  e.noise = {c.epsilon, c.noise_seed.value_or(seed)};
  e.seed = seed;
  return e;
}

}  // namespace

fbm::PathSampler make_sampler(const ExperimentConfig& config, double hurst) {
  return {time_grid(config), fbm::HurstIndex(hurst)};
}

inverse::KernelTable make_kernels(const ExperimentConfig& config, double hurst) {
  const auto problem = make_problem(config);
  return inverse::build_kernel_table(inverse::KernelProblem::from(problem), fbm::HurstIndex(hurst),
                                     config.modes, config.kernel);
}

ReconstructOutcome reconstruct(const ExperimentConfig& config, const fbm::PathSampler& sampler,
                               const inverse::KernelTable& kernels, std::uint64_t seed) {
  const auto problem = make_problem(config);
  const auto rgrid = radial_grid(config);
  ReconstructOutcome out;
  out.hurst = sampler.hurst().value();
  out.seed = seed;
  out.stats = ensemble::run_ensemble(problem, rgrid, sampler, ensemble_config(config, seed));
  out.recon = inverse::reconstruct(out.stats, kernels, config.modes, rgrid);
  out.f_truth = sample(problem.f, rgrid);
  out.g_squared_truth = sample(problem.g, rgrid);
  for (double& v : out.g_squared_truth) v *= v;
  inverse::score(out.recon, out.f_truth, out.g_squared_truth, rgrid);
  out.kernel_method = kernels.method;
  out.kernel_warnings = kernels.warnings.size();
  return out;
}

ReconstructOutcome reconstruct(const ExperimentConfig& config) {
  const auto sampler = make_sampler(config, config.hurst);
  const auto kernels = make_kernels(config, config.hurst);
  return reconstruct(config, sampler, kernels, config.seed);
}

std::vector<SweepRow> sweep(const ExperimentConfig& config) {
  const std::vector<std::uint64_t> seeds =
      config.seeds.empty() ? std::vector<std::uint64_t>{config.seed} : config.seeds;
  std::vector<SweepRow> rows;
  for (double hurst : config.hurst_list) {
    const auto sampler = make_sampler(config, hurst);
    const auto kernels = make_kernels(config, hurst);
    for (std::uint64_t seed : seeds) {
      const auto outcome = reconstruct(config, sampler, kernels, seed);
      rows.push_back({hurst, seed, *outcome.recon.f_error, *outcome.recon.g_squared_error});
    }
  }
  return rows;
}

void write_field(const forward::FieldHistory& field, const std::filesystem::path& file) {
  csv::Writer out(file, {"t", "r", "u"});
  for (std::size_t k = 0; k < field.tgrid.size(); ++k) {
    const double t = field.tgrid.node(k);
    const auto level = field.level(k);
    for (std::size_t i = 0; i < field.rgrid.size(); ++i) out.row({t, field.rgrid.node(i), level[i]});
  }
}

void write_stats(const ensemble::EnsembleStats& stats, const std::filesystem::path& dir) {
  {
    csv::Writer out(dir / "stats.csv", {"n", "mean", "var"});
    for (std::size_t n = 1; n <= stats.modes(); ++n)
      out.row({static_cast<double>(n), stats.mean[n - 1], stats.variance(n)});
  }
  csv::Writer out(dir / "cov.csv", {"m", "n", "value"});
  for (std::size_t m = 1; m <= stats.modes(); ++m)
    for (std::size_t n = 1; n <= stats.modes(); ++n)
      out.row({static_cast<double>(m), static_cast<double>(n), stats.cov(m - 1, n - 1)});
}

void write_reconstruction(const ExperimentConfig& config, const ReconstructOutcome& outcome,
                          const std::filesystem::path& dir) {
  const auto rgrid = radial_grid(config);
  {
    csv::Writer out(dir / "f_recon.csv", {"r", "recon", "truth"});
    for (std::size_t i = 0; i < rgrid.size(); ++i)
      out.row({rgrid.node(i), outcome.recon.f_values[i], outcome.f_truth[i]});
  }
  {
    csv::Writer out(dir / "g2_recon.csv", {"r", "recon", "truth"});
    for (std::size_t i = 0; i < rgrid.size(); ++i)
      out.row({rgrid.node(i), outcome.recon.g_squared_values[i], outcome.g_squared_truth[i]});
  }
  csv::Writer out(dir / "summary.csv", {"quantity", "value"});
  auto put = [&](const char* name, double value) { out.row({std::string(name), csv::format(value)}); };
  put("H", outcome.hurst);
  put("seed", static_cast<double>(outcome.seed));
  put("N1", static_cast<double>(outcome.recon.truncation));
  put("P", static_cast<double>(outcome.stats.path_count));
  put("M", static_cast<double>(config.time_steps));
  put("N", static_cast<double>(config.radial_intervals));
  put("epsilon", config.epsilon);
  put("mean_delta", outcome.stats.mean_delta);
  put("f_error", outcome.recon.f_error.value_or(0.0));
  put("g2_error", outcome.recon.g_squared_error.value_or(0.0));
  put("skipped_entries", static_cast<double>(outcome.recon.skipped.size()));
  put("kernel_warnings", static_cast<double>(outcome.kernel_warnings));
  out.row({std::string("kernel_method"), std::string(inverse::to_string(outcome.kernel_method))});
}

void write_decay(const inverse::DecayProbe& probe, const std::filesystem::path& file) {
  csv::Writer out(file, {"n", "lambda", "I", "E"});
  for (std::size_t i = 0; i < probe.n.size(); ++i)
    out.row({static_cast<double>(probe.n[i]), probe.lambda[i], probe.source[i], probe.noise[i]});
}

void write_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& file) {
  csv::Writer out(file, {"H", "seed", "f_error", "g2_error"});
  for (const auto& r : rows)
    out.row({r.hurst, static_cast<double>(r.seed), r.f_error, r.g_squared_error});
}

std::vector<std::filesystem::path> run(Command command, const ExperimentConfig& config,
                                       const std::filesystem::path& out_dir, std::ostream& log) {
  for (const auto& warning : validate(config, command)) log << "warning: " << warning << '\n';
  std::filesystem::create_directories(out_dir);
  const auto problem = make_problem(config);
  const auto rgrid = radial_grid(config);
  const auto tgrid = time_grid(config);

  switch (command) {
    case Command::forward: {
      const fbm::PathSampler sampler(tgrid, fbm::HurstIndex(config.hurst));
      std::vector<double> path(tgrid.size()), normals(tgrid.steps());
      sampler.draw(config.seed, 0, path, normals);
      write_field(forward::solve_fd(problem, rgrid, tgrid, path), out_dir / "field.csv");
      return {out_dir / "field.csv"};
    }
    case Command::ensemble: {
      const auto stats = ensemble::run_ensemble(problem, rgrid, tgrid, fbm::HurstIndex(config.hurst),
                                                ensemble_config(config, config.seed));
      write_stats(stats, out_dir);
      return {out_dir / "stats.csv", out_dir / "cov.csv"};
    }
    case Command::reconstruct: {
      const auto outcome = reconstruct(config);
      if (outcome.kernel_warnings)
        log << "warning: " << outcome.kernel_warnings
            << " Monte-Carlo kernel entries exceed the standard-error tolerance\n";
      if (!outcome.recon.skipped.empty())
        log << "warning: " << outcome.recon.skipped.size()
            << " covariance entries skipped (|E_mn| below floor)\n";
      write_reconstruction(config, outcome, out_dir);
      log << "f_error " << csv::format(*outcome.recon.f_error) << ", g2_error "
          << csv::format(*outcome.recon.g_squared_error) << '\n';
      return {out_dir / "f_recon.csv", out_dir / "g2_recon.csv", out_dir / "summary.csv"};
    }
    case Command::probe_decay: {
      const auto probe = inverse::decay_probe(config.probe_first, config.probe_last,
                                              fbm::HurstIndex(config.hurst),
                                              inverse::KernelProblem::from(problem), config.kernel);
      write_decay(probe, out_dir / "decay.csv");
      log << "slope(I_n) " << csv::format(probe.source_slope) << ", slope(E_nn) "
          << csv::format(probe.noise_slope) << '\n';
      return {out_dir / "decay.csv"};
    }
    case Command::sweep_h: {
      const auto rows = sweep(config);
      write_sweep(rows, out_dir / "sweep.csv");
      return {out_dir / "sweep.csv"};
    }
  }
  throw ConfigError("unhandled command");
}

}  // namespace helios::cli
