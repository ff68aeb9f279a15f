#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "helios/ensemble.hpp"
#include "helios/fbm.hpp"
#include "helios/forward.hpp"
#include "helios/linalg.hpp"
#include "helios/spectral.hpp"

namespace helios::inverse {

enum class KernelMethod { quadrature, monte_carlo };

const char* to_string(KernelMethod method);

/// Resolution knobs for the kernel integrals.
struct KernelConfig {
  /// Simpson steps for I_n and for H = 1/2 noise entries (even).
  std::size_t quad_steps = 8192;
  /// Uniform cells for the H > 1/2 double integral.
  std::size_t cells = 4096;
  /// Monte-Carlo sample count and time steps for H < 1/2.
  std::size_t mc_paths = 20000;
  std::size_t mc_steps = 2048;
  std::uint64_t mc_seed = 1;
  /// A Monte-Carlo entry is flagged when std_error > tolerance * |value|.
  double mc_rel_tolerance = 0.05;
};

/// The time-only data the kernels depend on.
struct KernelProblem {
  forward::TimeFunction a;
  forward::TimeFunction h;
  double radius = 0.0;
  double t_final = 0.0;

  static KernelProblem from(const forward::DiffusionProblem& problem) {
    return {problem.a, problem.h, problem.radius, problem.t_final};
  }
};

struct KernelEntry {
  double value = 0.0;
  double std_error = 0.0;
  KernelMethod method = KernelMethod::quadrature;
  bool warning = false;
};

/**
 * I_n = int_0^T h(tau) e^{-lambda_n int_tau^T a} dtau and
 * E_mn = E[ int phi_m dB^H  int phi_n dB^H ], phi_n(tau) = e^{-lambda_n int_tau^T a},
 * for n, m = 1..N1.
 */
struct KernelTable {
  fbm::HurstIndex hurst{0.5};
  KernelMethod method = KernelMethod::quadrature;
  std::vector<double> source;
  Matrix noise;
  Matrix noise_std_error;
  /// 1-based (m, n), m <= n, whose Monte-Carlo error exceeds the tolerance.
  std::vector<std::pair<std::size_t, std::size_t>> warnings;

  std::size_t modes() const { return source.size(); }
};

double source_kernel(std::size_t n, const KernelProblem& problem, std::size_t quad_steps);

/**
 * E_mn by regime:
 *  - H = 1/2: Simpson of e^{-(lambda_m + lambda_n)(A(T) - A(tau))} (Ito isometry);
 *  - H > 1/2: alpha_H double integral with |r - u|^{2H-2} integrated exactly per
 *    cell and phi taken at cell midpoints;
 *  - H < 1/2: Monte-Carlo mean of the product of the two discretized integrals.
 */
KernelEntry noise_kernel(std::size_t m, std::size_t n, fbm::HurstIndex hurst,
                         const KernelProblem& problem, const KernelConfig& config);

KernelTable build_kernel_table(const KernelProblem& problem, fbm::HurstIndex hurst,
                               std::size_t modes, const KernelConfig& config);

struct Reconstruction {
  std::size_t truncation = 0;
  spectral::ModalCoefficients f_coeffs;
  Matrix g_products;  // symmetrized
  std::vector<double> f_values;
  std::vector<double> g_squared_values;
  /// 1-based (m, n) entries dropped because |E_mn| < 1e-14.
  std::vector<std::pair<std::size_t, std::size_t>> skipped;
  std::optional<double> f_error;
  std::optional<double> g_squared_error;
};

inline constexpr double kKernelFloor = 1e-14;

/// f_n = mean_n / I_n and g_m g_n = cov_mn / E_mn for m, n <= N1.
Reconstruction reconstruct(const ensemble::EnsembleStats& stats, const KernelTable& kernels,
                           std::size_t truncation, const spectral::RadialGrid& grid);

/// ||recon - truth|| / ||truth|| in the r^2-weighted norm; the absolute norm if truth = 0.
double relative_error(std::span<const double> recon, std::span<const double> truth,
                      const spectral::RadialGrid& grid);

/// Fills f_error and g_squared_error against sampled ground truth.
void score(Reconstruction& recon, std::span<const double> f_truth,
           std::span<const double> g_squared_truth, const spectral::RadialGrid& grid);

struct DecayProbe {
  std::vector<std::size_t> n;
  std::vector<double> lambda;
  std::vector<double> source;  // I_n
  std::vector<double> noise;   // E_nn
  double source_slope = 0.0;   // d log|I_n| / d log lambda_n
  double noise_slope = 0.0;    // d log E_nn / d log lambda_n
};

DecayProbe decay_probe(std::size_t n_first, std::size_t n_last, fbm::HurstIndex hurst,
                       const KernelProblem& problem, const KernelConfig& config);

/// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

namespace reference {
KernelTable build_kernel_table(const KernelProblem& problem, fbm::HurstIndex hurst,
                               std::size_t modes, const KernelConfig& config);
}

}  // namespace helios::inverse
