#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "helios/ensemble.hpp"
#include "helios/forward.hpp"
#include "helios/inverse.hpp"

namespace helios::cli {

/// A parsed `name(args)` function spec together with its text.
struct FunctionSpec {
  std::string text;
  std::function<double(double)> fn;

  double operator()(double x) const { return fn(x); }
};

/**
 * Builtins:
 *   const(c)                 c
 *   power(p)                 x^p
 *   sin(k)                   sin(k x)
 *   hat(r1, r2, r3[, peak])  tent: 0 up to r1, rising to `peak` (default 1) at r2, 0 from r3
 *   box(r1, r2[, value])     `value` (default 1) on (r1, r2], 0 elsewhere
 *   table(file)              piecewise-linear through the (x, y) rows of `file`,
 *                            held constant past either end
 * Arguments accept numbers and `pi`, combined with `*` and `/` (e.g. 3*pi/4).
 * Relative table paths resolve against `base_dir`.
 */
FunctionSpec parse_function(const std::string& text, const std::filesystem::path& base_dir = {});

/// Evaluates a numeric argument such as `0.25`, `pi`, `3*pi/4`.
double parse_number(const std::string& text);

enum class Command { forward, ensemble, reconstruct, probe_decay, sweep_h };

std::optional<Command> parse_command(const std::string& name);
const char* to_string(Command command);

/// Flat `key = value` experiment description; `#` starts a comment.
struct ExperimentConfig {
  double radius = 3.14159265358979323846;  // R0
  double t_final = 1.0;                    // T
  std::size_t time_steps = 2048;           // M
  std::size_t radial_intervals = 100;      // N
  std::size_t modes = 30;                  // N1
  std::size_t paths = 1000;                // P
  double hurst = 0.5;                      // H
  double epsilon = 0.001;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> noise_seed;
  ensemble::Solver solver = ensemble::Solver::fd;

  std::string a_spec = "power(2)";
  std::string f_spec = "sin(3)";
  std::string g_spec = "sin(2)";
  std::string h_spec = "const(1)";

  std::vector<double> hurst_list{0.1, 0.5, 0.9};
  std::vector<std::uint64_t> seeds;  // empty: {seed}

  std::size_t probe_first = 1;
  std::size_t probe_last = 30;

  inverse::KernelConfig kernel;

  std::filesystem::path base_dir;
};

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError naming the violated invariant; returns warnings.
std::vector<std::string> validate(const ExperimentConfig& config, Command command);

forward::DiffusionProblem make_problem(const ExperimentConfig& config);

}  // namespace helios::cli
