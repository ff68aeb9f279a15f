#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "helios/errors.hpp"
#include "helios/fbm.hpp"

using namespace helios;
using fbm::HurstIndex;
using fbm::TimeGrid;

namespace {

// Independent evaluation of R(t, s) through exp/log, used as a second route.
double covariance_via_exp(double t, double s, double hurst) {
  auto pw = [&](double x) { return x == 0.0 ? 0.0 : std::exp(2.0 * hurst * std::log(x)); };
  return 0.5 * (pw(t) + pw(s) - pw(std::abs(t - s)));
}

struct MeanAndError {
  double mean;
  double std_error;
};

MeanAndError mean_with_error(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

TEST_CASE("hurst index is strictly inside (0, 1)") {
  CHECK_THROWS_AS(HurstIndex(0.0), DomainError);
  CHECK_THROWS_AS(HurstIndex(1.0), DomainError);
  CHECK_THROWS_AS(HurstIndex(-0.2), DomainError);
  CHECK(HurstIndex(0.3).value() == 0.3);
}

TEST_CASE("time grid nodes") {
  const TimeGrid grid(0.7, 7);
  CHECK(grid.node(0) == 0.0);
  CHECK(grid.node(7) == 0.7);
  for (std::size_t k = 1; k <= 7; ++k) CHECK(grid.node(k) > grid.node(k - 1));
  CHECK_THROWS_AS(TimeGrid(1.0, 0), DomainError);
}

TEST_CASE("covariance examples") {
  CHECK(fbm::covariance(1.0, 1.0, HurstIndex(0.3)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fbm::covariance(2.0, 1.0, HurstIndex(0.5)) == doctest::Approx(1.0).epsilon(1e-15));
  const double expected = 0.5 * std::pow(0.5, 1.5);
  CHECK(expected == doctest::Approx(0.176777).epsilon(1e-6));
  CHECK(fbm::covariance(0.5, 0.25, HurstIndex(0.75)) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(covariance_via_exp(0.5, 0.25, 0.75) == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(fbm::covariance(-1.0, 1.0, HurstIndex(0.5)), DomainError);
}

TEST_CASE("covariance properties on random arguments") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> time(0.0, 5.0);
  std::uniform_real_distribution<double> hurst(0.01, 0.99);
  for (int trial = 0; trial < 500; ++trial) {
    const double t = time(gen), s = time(gen);
    const HurstIndex h(hurst(gen));
    CHECK(fbm::covariance(t, s, h) == fbm::covariance(s, t, h));
    CHECK(fbm::covariance(t, t, h) == doctest::Approx(std::pow(t, h.twice())).epsilon(1e-13));
    CHECK(fbm::covariance(t, s, h) ==
          doctest::Approx(covariance_via_exp(t, s, h.value())).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("increment covariance examples and identity") {
  CHECK(fbm::increment_covariance(3, 2, 1, HurstIndex(0.5)) == doctest::Approx(0.0).scale(1.0));
  const double expected = 0.5 * (std::pow(2.0, 1.8) - 2.0);
  CHECK(expected == doctest::Approx(0.74110).epsilon(1e-5));
  CHECK(fbm::increment_covariance(3, 2, 1, HurstIndex(0.9)) == doctest::Approx(expected));
  CHECK_THROWS_AS(fbm::increment_covariance(1, 2, 3, HurstIndex(0.5)), DomainError);
  CHECK_THROWS_AS(fbm::increment_covariance(2, 2, 1, HurstIndex(0.5)), DomainError);

  // E[(Bt - Bs)(Bs - Br)] = R(t,s) - R(t,r) - R(s,s) + R(s,r)
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double r = u(gen), s = r + u(gen) + 1e-3, t = s + u(gen) + 1e-3;
    const HurstIndex h(0.05 + 0.9 * u(gen));
    const double via_r = fbm::covariance(t, s, h) - fbm::covariance(t, r, h) -
                         fbm::covariance(s, s, h) + fbm::covariance(s, r, h);
    CHECK(fbm::increment_covariance(t, s, r, h) == doctest::Approx(via_r).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("increment covariance against Monte-Carlo at H = 0.9") {
  const auto paths = fbm::sample_paths(TimeGrid(3.0, 3), HurstIndex(0.9), 10000, 2024);
  std::vector<double> products;
  for (std::size_t k = 0; k < paths.count(); ++k) {
    const auto p = paths.path(k);
    products.push_back((p[3] - p[2]) * (p[2] - p[1]));
  }
  const auto est = mean_with_error(products);
  CHECK(std::abs(est.mean - 0.5 * (std::pow(2.0, 1.8) - 2.0)) < 3.0 * est.std_error);
}

TEST_CASE("lag covariance matches the three-point increment formula") {
  const HurstIndex h(0.3);
  const double step = 0.125;
  CHECK(fbm::increment_lag_covariance(0, step, h) == doctest::Approx(std::pow(step, 0.6)));
  for (std::size_t lag = 1; lag < 6; ++lag) {
    // E[dB_0 dB_lag] = E[(B(s1+step)-B(s1)) (B(step)-B(0))] via the covariance function.
    const double s1 = static_cast<double>(lag) * step;
    const double direct = fbm::covariance(s1 + step, step, h) - fbm::covariance(s1 + step, 0.0, h) -
                          fbm::covariance(s1, step, h) + fbm::covariance(s1, 0.0, h);
    CHECK(fbm::increment_lag_covariance(lag, step, h) ==
          doctest::Approx(direct).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("Brownian variance at t = 1") {
  const auto paths = fbm::sample_paths(TimeGrid(1.0, 1), HurstIndex(0.5), 100000, 1);
  std::vector<double> sq;
  for (std::size_t k = 0; k < paths.count(); ++k) sq.push_back(paths.path(k)[1] * paths.path(k)[1]);
  const auto est = mean_with_error(sq);
  CHECK(std::abs(est.mean - 1.0) < 3.0 * est.std_error);
}

TEST_CASE("paths start at zero and the increment variance law holds") {
  const TimeGrid grid(1.0, 64);
  const auto paths = fbm::sample_paths(grid, HurstIndex(0.3), 10000, 7);
  for (std::size_t k = 0; k < paths.count(); ++k) REQUIRE(paths.path(k)[0] == 0.0);

  std::vector<double> sq;
  for (std::size_t k = 0; k < paths.count(); ++k) {
    const double d = paths.path(k)[32] - paths.path(k)[16];
    sq.push_back(d * d);
  }
  const auto est = mean_with_error(sq);
  CHECK(std::pow(0.25, 0.6) == doctest::Approx(0.43528).epsilon(1e-4));
  CHECK(std::abs(est.mean - std::pow(0.25, 0.6)) < 3.0 * est.std_error);

  // single step of width h_t
  std::vector<double> step_sq;
  for (std::size_t k = 0; k < paths.count(); ++k) {
    const double d = paths.path(k)[40] - paths.path(k)[39];
    step_sq.push_back(d * d);
  }
  const auto step_est = mean_with_error(step_sq);
  CHECK(std::abs(step_est.mean - std::pow(grid.step(), 0.6)) < 3.0 * step_est.std_error);
}

TEST_CASE("Brownian increments on disjoint intervals are uncorrelated") {
  const auto paths = fbm::sample_paths(TimeGrid(1.0, 16), HurstIndex(0.5), 10000, 99);
  std::vector<double> products;
  for (std::size_t k = 0; k < paths.count(); ++k) {
    const auto p = paths.path(k);
    products.push_back((p[4] - p[2]) * (p[12] - p[8]));
  }
  const auto est = mean_with_error(products);
  CHECK(std::abs(est.mean) < 3.0 * est.std_error);
}

TEST_CASE("gram matrix handed to the factorization equals R entrywise") {
  const TimeGrid grid(1.0, 64);
  for (double h : {0.25, 0.5, 0.75}) {
    const fbm::PathSampler sampler(grid, HurstIndex(h));
    CHECK(sampler.jitter() == 0.0);
    for (std::size_t i = 0; i < 64; ++i)
      for (std::size_t j = 0; j < 64; ++j)
        CHECK(std::abs(sampler.gram()(i, j) -
                       covariance_via_exp(grid.node(i + 1), grid.node(j + 1), h)) <= 1e-12);
  }
}

TEST_CASE("extreme Hurst indices still factor") {
  const TimeGrid grid(1.0, 256);
  for (double h : {0.02, 0.98}) {
    const fbm::PathSampler sampler(grid, HurstIndex(h));
    CHECK(sampler.jitter() <= 1e-10 * sampler.gram()(255, 255));
  }
}

TEST_CASE("sampling is deterministic and thread-count independent") {
  const fbm::PathSampler sampler(TimeGrid(1.0, 50), HurstIndex(0.7));
  const auto a = fbm::sample_paths(sampler, 300, 42);
  const auto b = fbm::sample_paths(sampler, 300, 42);
  const auto serial = fbm::reference::sample_paths(sampler, 300, 42);
  const auto other = fbm::sample_paths(sampler, 300, 43);
  CHECK(a.values() == b.values());
  CHECK(a.values() == serial.values());
  CHECK_FALSE(a.values() == other.values());
  // A prefix of a larger ensemble is the smaller ensemble.
  const auto longer = fbm::sample_paths(sampler, 400, 42);
  for (std::size_t k = 0; k < 300; ++k)
    for (std::size_t j = 0; j < 51; ++j) REQUIRE(longer.path(k)[j] == a.path(k)[j]);
}

TEST_CASE("increments") {
  Matrix single(1, 3);
  single(0, 1) = 0.4;
  single(0, 2) = -0.1;
  const fbm::PathEnsemble one(TimeGrid(1.0, 2), HurstIndex(0.5), 0, single);
  const auto inc = fbm::increments(one);
  CHECK(inc(0, 0) == 0.4);
  CHECK(inc(0, 1) == doctest::Approx(-0.5));

  const fbm::PathEnsemble zero(TimeGrid(1.0, 4), HurstIndex(0.5), 0, Matrix(3, 5));
  const auto zero_inc = fbm::increments(zero);
  for (double v : zero_inc.data()) CHECK(v == 0.0);

  const auto paths = fbm::sample_paths(TimeGrid(1.0, 128), HurstIndex(0.35), 50, 3);
  const auto d = fbm::increments(paths);
  for (std::size_t k = 0; k < paths.count(); ++k) {
    double sum = 0.0;
    for (double v : d.row(k)) sum += v;
    CHECK(std::abs(sum - paths.path(k)[128]) <= 1e-14);
  }
}
