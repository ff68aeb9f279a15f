#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "helios/config.hpp"
#include "helios/ensemble.hpp"
#include "helios/fbm.hpp"
#include "helios/forward.hpp"
#include "helios/inverse.hpp"

namespace helios::cli {

struct ReconstructOutcome {
  double hurst = 0.0;
  std::uint64_t seed = 0;
  ensemble::EnsembleStats stats;
  inverse::Reconstruction recon;
  std::vector<double> f_truth;
  std::vector<double> g_squared_truth;
  inverse::KernelMethod kernel_method = inverse::KernelMethod::quadrature;
  std::size_t kernel_warnings = 0;
};

struct SweepRow {
  double hurst = 0.0;
  std::uint64_t seed = 0;
  double f_error = 0.0;
  double g_squared_error = 0.0;
};

fbm::PathSampler make_sampler(const ExperimentConfig& config, double hurst);
inverse::KernelTable make_kernels(const ExperimentConfig& config, double hurst);

/// Ensemble -> kernels -> reconstruction -> error scoring. The sampler and
/// kernel table depend only on (a, h, T, M, H), so callers may share them
/// across source profiles.
ReconstructOutcome reconstruct(const ExperimentConfig& config, const fbm::PathSampler& sampler,
                               const inverse::KernelTable& kernels, std::uint64_t seed);
ReconstructOutcome reconstruct(const ExperimentConfig& config);

std::vector<SweepRow> sweep(const ExperimentConfig& config);

void write_field(const forward::FieldHistory& field, const std::filesystem::path& file);
void write_stats(const ensemble::EnsembleStats& stats, const std::filesystem::path& dir);
void write_reconstruction(const ExperimentConfig& config, const ReconstructOutcome& outcome,
                          const std::filesystem::path& dir);
void write_decay(const inverse::DecayProbe& probe, const std::filesystem::path& file);
void write_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& file);

/// Runs one command end to end, writing its CSV artifacts into `out_dir`.
/// Returns the files written.
std::vector<std::filesystem::path> run(Command command, const ExperimentConfig& config,
                                       const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace helios::cli
