// helios: batch driver for the stochastic helium production-diffusion
// forward solve and source reconstruction.
//
//   helios <command> <config> [--out DIR] [--threads K] [--seed S]
//
// Commands: forward, ensemble, reconstruct, probe-decay, sweep-h.
// Exit status: 0 success, 2 configuration error, 3 numerical failure, 1 other.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "helios/config.hpp"
#include "helios/errors.hpp"
#include "helios/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stochastic helium diffusion: forward solves and source reconstruction"};
  std::string command_name;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command_name,
                 "forward | ensemble | reconstruct | probe-decay | sweep-h")
      ->required();
  app.add_option("config", config_path, "experiment config file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads (fallback: HELIOS_THREADS)");
  app.add_option("--seed", seed, "override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto command = helios::cli::parse_command(command_name);
  if (!command) {
    std::cerr << "helios: unknown command '" << command_name << "'\n";
    return 2;
  }
  if (!threads) {
    if (const char* env = std::getenv("HELIOS_THREADS")) {
      try {
        threads = std::stoi(env);
      } catch (const std::exception&) {
        std::cerr << "helios: HELIOS_THREADS is not an integer: " << env << '\n';
        return 2;
      }
    }
  }
  if (threads) {
    if (*threads < 1) {
      std::cerr << "helios: --threads must be >= 1\n";
      return 2;
    }
    omp_set_num_threads(*threads);
  }

  try {
    auto config = helios::cli::load_config(config_path);
    if (seed) config.seed = *seed;
    for (const auto& file : helios::cli::run(*command, config, out_dir, std::cerr))
      std::cout << file.string() << '\n';
    return 0;
  } catch (const helios::ConfigError& e) {
    std::cerr << "helios: " << e.what() << '\n';
    return 2;
  } catch (const helios::DomainError& e) {
    std::cerr << "helios: " << e.what() << '\n';
    return 2;
  } catch (const helios::NumericError& e) {
    std::cerr << "helios: numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const helios::DataError& e) {
    std::cerr << "helios: numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "helios: " << e.what() << '\n';
    return 1;
  }
}
