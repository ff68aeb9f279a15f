#include "helios/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "helios/errors.hpp"

namespace helios::spectral {

RadialGrid::RadialGrid(double radius, std::size_t intervals)
    : radius_(radius), intervals_(intervals) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw DomainError("radial grid needs a positive finite radius");
  if (intervals < 2) throw DomainError("radial grid needs N >= 2");
}

double RadialGrid::node(std::size_t i) const {
  if (i == intervals_) return radius_;
  return static_cast<double>(i) * radius_ / static_cast<double>(intervals_);
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = node(i);
  return out;
}

double sinc(double x) {
  if (std::abs(x) < 1e-8) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double eigenvalue(std::size_t n, double radius) {
  if (n == 0) throw DomainError("eigenvalue index starts at n = 1");
  if (!(radius > 0.0)) throw DomainError("eigenvalue needs R0 > 0");
  const double k = static_cast<double>(n) * std::numbers::pi / radius;
  return k * k;
}

double eigenfunction(std::size_t n, double radius, double r) {
  if (n == 0) throw DomainError("eigenfunction index starts at n = 1");
  if (!(radius > 0.0)) throw DomainError("eigenfunction needs R0 > 0");
  if (r < 0.0 || r > radius) throw DomainError("eigenfunction evaluated outside [0, R0]");
  const double k = static_cast<double>(n) * std::numbers::pi / radius;
  return std::numbers::sqrt2 * k / std::sqrt(radius) * sinc(k * r);
}

std::vector<double> simpson_weights(std::size_t intervals, double step) {
  if (intervals == 0 || intervals % 2 != 0) {
    std::ostringstream msg;
    msg << "composite Simpson needs an even number of intervals, got " << intervals;
    throw ConfigError(msg.str());
  }
  std::vector<double> w(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double c = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[i] = c * step / 3.0;
  }
  return w;
}

ModeBasis::ModeBasis(RadialGrid grid, std::size_t modes)
    : grid_(grid), modes_(modes), values_(modes, grid.size()), eigenvalues_(modes) {
  weights_ = simpson_weights(grid_.intervals(), grid_.step());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double r = grid_.node(i);
    weights_[i] *= r * r;
  }
  for (std::size_t n = 1; n <= modes_; ++n) {
    eigenvalues_[n - 1] = eigenvalue(n, grid_.radius());
    auto row = values_.row(n - 1);
    for (std::size_t i = 0; i < grid_.size(); ++i)
      row[i] = eigenfunction(n, grid_.radius(), grid_.node(i));
  }
}

double ModeBasis::inner(std::span<const double> a, std::span<const double> b) const {
  if (a.size() != weights_.size() || b.size() != weights_.size())
    throw DataError("values are not sampled on the basis grid");
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) acc += weights_[i] * a[i] * b[i];
  return acc;
}

double ModeBasis::norm(std::span<const double> values) const {
  return std::sqrt(std::max(0.0, inner(values, values)));
}

ModalCoefficients ModeBasis::project(std::span<const double> values) const {
  ModalCoefficients out{std::vector<double>(modes_), grid_.radius()};
  for (std::size_t n = 1; n <= modes_; ++n) out.values[n - 1] = inner(values, mode(n));
  return out;
}

std::vector<double> ModeBasis::synthesize(const ModalCoefficients& coeffs) const {
  if (coeffs.size() > modes_) throw DataError("more coefficients than basis modes");
  std::vector<double> out(grid_.size(), 0.0);
  for (std::size_t n = 1; n <= coeffs.size(); ++n) {
    const double c = coeffs.values[n - 1];
    const auto w = mode(n);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * w[i];
  }
  return out;
}

std::vector<double> ModeBasis::synthesize_squared(const Matrix& products) const {
  const std::size_t k = products.rows();
  if (products.cols() != k) throw DataError("product matrix must be square");
  if (k > modes_) throw DataError("product matrix larger than the basis");
  for (std::size_t m = 0; m < k; ++m) {
    for (std::size_t n = m + 1; n < k; ++n) {
      if (std::abs(products(m, n) - products(n, m)) > 1e-8) {
        std::ostringstream msg;
        msg << "product matrix asymmetric at (" << m + 1 << ", " << n + 1 << ")";
        throw DataError(msg.str());
      }
    }
  }
  std::vector<double> out(grid_.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      const double wm = values_(m, i);
      double inner_sum = 0.0;
      for (std::size_t n = 0; n < k; ++n) inner_sum += products(m, n) * values_(n, i);
      acc += wm * inner_sum;
    }
    out[i] = acc;
  }
  return out;
}

std::vector<double> ModeBasis::synthesize_squared(const ModalCoefficients& coeffs) const {
  const std::size_t k = coeffs.size();
  Matrix products(k, k);
  for (std::size_t m = 0; m < k; ++m)
    for (std::size_t n = 0; n < k; ++n) products(m, n) = coeffs.values[m] * coeffs.values[n];
  return synthesize_squared(products);
}

bool exceeds_mode_ceiling(const RadialGrid& grid, std::size_t modes) {
  return 3 * modes > grid.intervals();
}

ModalCoefficients project(std::span<const double> values, const RadialGrid& grid,
                          std::size_t modes) {
  return ModeBasis(grid, modes).project(values);
}

std::vector<double> synthesize(const ModalCoefficients& coeffs, const RadialGrid& grid) {
  return ModeBasis(grid, coeffs.size()).synthesize(coeffs);
}

std::vector<double> synthesize_squared(const Matrix& products, const RadialGrid& grid) {
  return ModeBasis(grid, products.rows()).synthesize_squared(products);
}

std::vector<double> synthesize_squared(const ModalCoefficients& coeffs, const RadialGrid& grid) {
  return ModeBasis(grid, coeffs.size()).synthesize_squared(coeffs);
}

double weighted_l2_norm(std::span<const double> values, const RadialGrid& grid) {
  return ModeBasis(grid, 0).norm(values);
}

}  // namespace helios::spectral
