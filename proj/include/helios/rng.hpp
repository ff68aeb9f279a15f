#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace helios::rng {

/// Stream tags keep path, noise and kernel randomness disjoint for one master seed.
inline constexpr std::uint64_t kPathDomain = 0;
inline constexpr std::uint64_t kNoiseDomain = std::uint64_t{1} << 62;
inline constexpr std::uint64_t kKernelDomain = std::uint64_t{1} << 61;

/**
 * Reproducible random stream identified by (seed, stream_id).
 *
 * Engine: std::mt19937_64 seeded through std::seed_seq with the four 32-bit
 * halves of seed and stream_id. Both algorithms are fixed by the C++ standard,
 * so the raw sequence is identical on every conforming platform.
 *
 * Uniforms take the top 53 bits: u = (x >> 11 + 0.5) * 2^-53, which lies in
 * the open interval (0, 1). Gaussians use the basic Box-Muller transform
 * z0 = sqrt(-2 ln u1) cos(2 pi u2), z1 = sqrt(-2 ln u1) sin(2 pi u2), consumed
 * in that order.
 */
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id);

  double uniform();
  /// Uniform on (-1, 1).
  double symmetric_uniform() { return 2.0 * uniform() - 1.0; }
  double gaussian();
  void fill_gaussian(std::span<double> out);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace helios::rng
