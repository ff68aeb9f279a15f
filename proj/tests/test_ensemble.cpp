#include <chrono>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "helios/ensemble.hpp"
#include "helios/errors.hpp"

using namespace helios;
using ensemble::EnsembleConfig;
using ensemble::Solver;
using forward::DiffusionProblem;
using fbm::HurstIndex;
using fbm::TimeGrid;
using spectral::RadialGrid;

namespace {

constexpr double pi = std::numbers::pi;

DiffusionProblem baseline_problem(double t_final = 1.0) {
  return DiffusionProblem{[](double t) { return t * t; }, [](double r) { return std::sin(3.0 * r); },
                          [](double r) { return std::sin(2.0 * r); }, [](double) { return 1.0; }, pi, t_final};
}

double omega1(double r) { return spectral::eigenfunction(1, pi, r); }

}  // namespace

TEST_CASE("summarize uses the unbiased estimator") {
  Matrix s(3, 2);
  s(0, 0) = 1.0; s(0, 1) = 2.0;
  s(1, 0) = 2.0; s(1, 1) = 4.0;
  s(2, 0) = 3.0; s(2, 1) = 0.0;
  const auto st = ensemble::summarize(s, 5);
  CHECK(st.mean[0] == doctest::Approx(2.0));
  CHECK(st.mean[1] == doctest::Approx(2.0));
  CHECK(st.cov(0, 0) == doctest::Approx(1.0));
  CHECK(st.cov(1, 1) == doctest::Approx(4.0));
  CHECK(st.cov(0, 1) == doctest::Approx(-1.0));
  CHECK(st.cov(1, 0) == st.cov(0, 1));
  CHECK(st.path_count == 3);
  CHECK(st.seed == 5);
  CHECK_THROWS_AS(ensemble::summarize(Matrix(1, 2), 0), DomainError);
}

TEST_CASE("add_noise examples") {
  const RadialGrid grid(pi, 100);
  std::vector<double> u;
  for (double r : grid.nodes()) u.push_back(std::sin(3.0 * r) + 0.1);

  const auto none = ensemble::add_noise(u, {0.0, 3}, grid);
  CHECK(none.values == u);
  CHECK(none.delta == 0.0);

  const auto zero = ensemble::add_noise(std::vector<double>(101, 0.0), {0.5, 3}, grid);
  for (double v : zero.values) CHECK(v == 0.0);
  CHECK(zero.delta == 0.0);

  const double norm = spectral::weighted_l2_norm(u, grid);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto noisy = ensemble::add_noise(u, {0.001, seed}, grid);
    CHECK(noisy.delta <= 0.001 * norm);
    CHECK(noisy.delta > 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(noisy.values[i] - u[i]) <= 0.001 * std::abs(u[i]));
  }
  CHECK(ensemble::add_noise(u, {0.01, 9}, grid).values == ensemble::add_noise(u, {0.01, 9}, grid).values);
  CHECK_FALSE(ensemble::add_noise(u, {0.01, 9}, grid, 0).values == ensemble::add_noise(u, {0.01, 9}, grid, 1).values);
}

TEST_CASE("deterministic data gives zero covariance") {
  auto p = baseline_problem();
  p.g = [](double) { return 0.0; };
  const RadialGrid rgrid(pi, 60);
  const TimeGrid tgrid(1.0, 128);
  for (Solver solver : {Solver::fd, Solver::mild}) {
    EnsembleConfig cfg{20, 10, solver, {}, 4};
    const auto st = ensemble::run_ensemble(p, rgrid, tgrid, HurstIndex(0.4), cfg);
    for (double v : st.cov.data()) CHECK(std::abs(v) <= 1e-20);
    const auto path = fbm::sample_paths(tgrid, HurstIndex(0.4), 1, 0).path(0);
    std::vector<double> single;
    if (solver == Solver::fd) {
      single = forward::final_time_modes(forward::solve_fd(p, rgrid, tgrid, path), 10).values;
    } else {
      const auto traj = forward::solve_mild(p, rgrid, tgrid, path, 10);
      single.assign(traj.final_coefficients().begin(), traj.final_coefficients().end());
    }
    for (std::size_t n = 0; n < 10; ++n) CHECK(st.mean[n] == doctest::Approx(single[n]).epsilon(1e-12));
  }
}

TEST_CASE("ensemble variance follows the Ito isometry") {
  const DiffusionProblem p{[](double) { return 1.0; }, [](double) { return 0.0; }, omega1,
                           [](double) { return 1.0; }, pi, 1.0};
  const RadialGrid rgrid(pi, 100);
  const TimeGrid tgrid(1.0, 256);
  const fbm::PathSampler sampler(tgrid, HurstIndex(0.5));
  EnsembleConfig cfg{10000, 1, Solver::mild, {}, 77};
  const auto samples = ensemble::sample_final_modes(p, rgrid, sampler, cfg);
  const auto st = ensemble::summarize(samples, 77);
  double m4 = 0.0;
  for (std::size_t k = 0; k < samples.rows(); ++k) {
    const double d = samples(k, 0) - st.mean[0];
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(samples.rows());
  const double var = st.variance(1);
  const double se = std::sqrt((m4 / n - var * var) / n);
  CHECK(std::abs(var - (1.0 - std::exp(-2.0)) / 2.0) < 3.0 * se);
}

TEST_CASE("covariance is symmetric positive semidefinite") {
  const RadialGrid rgrid(pi, 60);
  const TimeGrid tgrid(1.0, 64);
  EnsembleConfig cfg{200, 8, Solver::fd, {0.01, 2}, 3};
  const auto st = ensemble::run_ensemble(baseline_problem(), rgrid, tgrid, HurstIndex(0.7), cfg);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(st.cov(i, i) >= -1e-12);
    for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(st.cov(i, j) - st.cov(j, i)) <= 1e-12);
  }
  // Cholesky with a 1e-10 shift succeeds iff the smallest eigenvalue exceeds -1e-10.
  Matrix shifted = st.cov;
  for (std::size_t i = 0; i < 8; ++i) shifted(i, i) += 1e-10;
  CHECK(linalg::cholesky_inplace(shifted.data(), 8).ok);
  CHECK(st.mean_delta > 0.0);
}

TEST_CASE("sign of g leaves the covariance unchanged and the mean within Monte-Carlo error") {
  const RadialGrid rgrid(pi, 60);
  const TimeGrid tgrid(1.0, 64);
  auto p = baseline_problem();
  auto q = p;
  q.g = [](double r) { return -std::sin(2.0 * r); };
  EnsembleConfig cfg{400, 6, Solver::fd, {}, 10};
  const auto a = ensemble::run_ensemble(p, rgrid, tgrid, HurstIndex(0.5), cfg);
  const auto b = ensemble::run_ensemble(q, rgrid, tgrid, HurstIndex(0.5), cfg);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(std::abs(a.cov(i, j) - b.cov(i, j)) <= 1e-10 * std::max(1.0, std::abs(a.cov(i, j))));
    const double se = std::sqrt(a.cov(i, i) / 400.0);
    CHECK(std::abs(a.mean[i] - b.mean[i]) <= 2.0 * 3.0 * se + 1e-14);
  }
}

TEST_CASE("noise-only covariance scales with epsilon squared") {
  auto p = baseline_problem();
  p.g = [](double) { return 0.0; };
  const RadialGrid rgrid(pi, 60);
  const TimeGrid tgrid(1.0, 64);
  EnsembleConfig cfg{300, 5, Solver::fd, {0.001, 8}, 1};
  const auto one = ensemble::run_ensemble(p, rgrid, tgrid, HurstIndex(0.5), cfg);
  cfg.noise.epsilon = 0.002;
  const auto two = ensemble::run_ensemble(p, rgrid, tgrid, HurstIndex(0.5), cfg);
  for (std::size_t n = 0; n < 5; ++n)
    CHECK(two.cov(n, n) == doctest::Approx(4.0 * one.cov(n, n)).epsilon(1e-6));
}

TEST_CASE("determinism and thread independence") {
  const RadialGrid rgrid(pi, 40);
  const fbm::PathSampler sampler(TimeGrid(1.0, 64), HurstIndex(0.3));
  for (Solver solver : {Solver::fd, Solver::mild}) {
    EnsembleConfig cfg{100, 8, solver, {0.001, 5}, 12};
    const auto a = ensemble::run_ensemble(baseline_problem(), rgrid, sampler, cfg);
    const auto b = ensemble::run_ensemble(baseline_problem(), rgrid, sampler, cfg);
    const auto serial = ensemble::reference::run_ensemble(baseline_problem(), rgrid, sampler, cfg);
    CHECK(a.mean == b.mean);
    CHECK(a.cov == b.cov);
    CHECK(a.mean == serial.mean);
    CHECK(a.cov == serial.cov);
    CHECK(a.mean_delta == serial.mean_delta);
  }
}

TEST_CASE("solver failures carry the path index") {
  auto p = baseline_problem();
  p.a = [](double t) { return t > 0.5 ? std::nan("") : 1.0; };
  EnsembleConfig cfg{4, 3, Solver::fd, {}, 1};
  CHECK_THROWS(ensemble::run_ensemble(p, RadialGrid(pi, 20), TimeGrid(1.0, 8), HurstIndex(0.5), cfg));
  EnsembleConfig one{1, 3, Solver::fd, {}, 1};
  CHECK_THROWS_AS(ensemble::run_ensemble(baseline_problem(), RadialGrid(pi, 20), TimeGrid(1.0, 8), HurstIndex(0.5), one),
                  DomainError);
}

TEST_CASE("stability ratio") {
  const RadialGrid rgrid(pi, 100);
  auto zero = baseline_problem();
  zero.f = [](double) { return 0.0; };
  zero.g = [](double) { return 0.0; };
  CHECK_THROWS_AS(ensemble::stability_ratio(zero, rgrid, TimeGrid(1.0, 16), 4, HurstIndex(0.5), 1), DomainError);

  const DiffusionProblem det{[](double) { return 1.0; }, omega1, [](double) { return 0.0; },
                             [](double) { return 1.0; }, pi, 1.0};
  const auto est = ensemble::stability_ratio(det, rgrid, TimeGrid(1.0, 1024), 2, HurstIndex(0.5), 1);
  const double closed = 1.0 - 2.0 * (1.0 - std::exp(-1.0)) + (1.0 - std::exp(-2.0)) / 2.0;
  CHECK(est.energy == doctest::Approx(closed).epsilon(0.03));
  CHECK(est.bound == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(est.ratio <= 1.0);
}

TEST_CASE("full-resolution configuration finishes quickly with finite statistics") {
  const auto start = std::chrono::steady_clock::now();
  EnsembleConfig cfg{1000, 30, Solver::fd, {0.001, 1}, 1};
  const auto st = ensemble::run_ensemble(baseline_problem(), RadialGrid(pi, 100), TimeGrid(1.0, 2048), HurstIndex(0.5), cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (double v : st.mean) CHECK(std::isfinite(v));
  for (double v : st.cov.data()) CHECK(std::isfinite(v));
  CHECK(seconds < 300.0);
  MESSAGE("full-resolution ensemble took " << seconds << " s");
}
