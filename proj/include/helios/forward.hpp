#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "helios/fbm.hpp"
#include "helios/linalg.hpp"
#include "helios/spectral.hpp"

namespace helios::forward {

using TimeFunction = std::function<double(double)>;
using RadialFunction = std::function<double(double)>;

/**
 * u_t = a(t) (u_rr + (2/r) u_r) + f(r) h(t) + g(r) dB^H/dt on 0 < r < R0,
 * u(r, 0) = 0, u(R0, t) = 0, u bounded at r = 0.
 */
struct DiffusionProblem {
  TimeFunction a;
  RadialFunction f;
  RadialFunction g;
  TimeFunction h;
  double radius = 0.0;
  double t_final = 0.0;
  /// Enforce h >= C(h) > 0 on the grid (needed for uniqueness of f).
  bool require_positive_h = true;
};

struct ProblemBounds {
  double a_min = 0.0;  // a0
  double a_max = 0.0;  // a1
  double h_min = 0.0;  // C(h)
  double h_sup = 0.0;  // ||h||_inf on the nodes
};

/// Checks the problem against a time grid. a is checked on t_1..t_M, the
/// nodes where the scheme evaluates it; h on t_0..t_M.
ProblemBounds validate(const DiffusionProblem& problem, const fbm::TimeGrid& tgrid);

/**
 * Cumulative integral A(t) = int_0^t a(s) ds.
 *
 * Node values come from per-step Simpson (each step split in two). Between
 * nodes A is the cubic Hermite interpolant built from A and A' = a at the step
 * ends, which reproduces A exactly whenever a is a polynomial of degree <= 2.
 */
class CumulativeIntegral {
 public:
  CumulativeIntegral(const TimeFunction& a, const fbm::TimeGrid& grid);

  const fbm::TimeGrid& grid() const { return grid_; }
  std::span<const double> table() const { return table_; }
  double at_node(std::size_t k) const { return table_[k]; }
  double operator()(double t) const;
  /// int_tau^t a(s) ds.
  double between(double tau, double t) const { return (*this)(t) - (*this)(tau); }

 private:
  fbm::TimeGrid grid_;
  std::vector<double> table_;
  std::vector<double> rate_;
};

CumulativeIntegral accumulate_a(const TimeFunction& a, const fbm::TimeGrid& grid);

/// u(r_i, t_k), rows indexed by k.
struct FieldHistory {
  spectral::RadialGrid rgrid;
  fbm::TimeGrid tgrid;
  Matrix values;

  std::span<const double> level(std::size_t k) const { return values.row(k); }
  std::span<const double> final_level() const { return values.row(values.rows() - 1); }
};

/// u_n(t_k), rows indexed by k, column n - 1 for mode n.
struct ModalTrajectory {
  fbm::TimeGrid tgrid;
  Matrix coeffs;

  std::span<const double> final_coefficients() const { return coeffs.row(coeffs.rows() - 1); }
};

/**
 * Backward-Euler / central-difference scheme for the radial problem.
 *
 * Each level solves A U^n = (h^2/h_t) U^{n-1} + h^2 F + (h^2/h_t) B + C for the
 * interior nodes r_1..r_{N-1}, with
 *   diag  h^2/h_t + 2 a(t_n),
 *   lower a(t_n) (h/r_i - 1),
 *   upper -a(t_n) (h/r_i + 1).
 * Since h/r_1 = 1 the u_0 coupling in C vanishes, and u_N = 0 removes the other
 * end, so C = 0. The origin value is closed by symmetry, u_0 = u_1.
 */
class FdSolver {
 public:
  FdSolver(const DiffusionProblem& problem, spectral::RadialGrid rgrid, fbm::TimeGrid tgrid);

  const spectral::RadialGrid& rgrid() const { return rgrid_; }
  const fbm::TimeGrid& tgrid() const { return tgrid_; }
  const ProblemBounds& bounds() const { return bounds_; }

  FieldHistory solve(std::span<const double> path) const;

  /// Steps to t_M writing only the final level into `out` (size N + 1).
  /// `observer`, if set, sees every level k = 0..M.
  void solve_final(std::span<const double> path, std::span<double> out,
                   const std::function<void(std::size_t, std::span<const double>)>& observer =
                       {}) const;

 private:
  template <typename Sink>
  void march(std::span<const double> path, std::span<double> level, Sink&& sink) const;

  spectral::RadialGrid rgrid_;
  fbm::TimeGrid tgrid_;
  ProblemBounds bounds_;
  std::vector<double> f_nodes_;
  std::vector<double> g_nodes_;
  std::vector<double> a_levels_;
  std::vector<double> h_levels_;
};

FieldHistory solve_fd(const DiffusionProblem& problem, const spectral::RadialGrid& rgrid,
                      const fbm::TimeGrid& tgrid, std::span<const double> path);

/**
 * Mild-solution evaluator:
 *   u_n(t) = f_n int_0^t h(tau) e^{-lambda_n (A(t) - A(tau))} dtau
 *          + g_n sum_k e^{-lambda_n (A(t) - A(tau_k))} (B(tau_{k+1}) - B(tau_k)),
 * with per-step Simpson for the first term and left-point sums for the second.
 */
class MildSolver {
 public:
  MildSolver(const DiffusionProblem& problem, fbm::TimeGrid tgrid,
             spectral::ModalCoefficients f_coeffs, spectral::ModalCoefficients g_coeffs);

  std::size_t modes() const { return f_coeffs_.size(); }
  ModalTrajectory solve(std::span<const double> path) const;
  /// u_n(T) only.
  void solve_final(std::span<const double> path, std::span<double> out) const;

 private:
  fbm::TimeGrid tgrid_;
  spectral::ModalCoefficients f_coeffs_;
  spectral::ModalCoefficients g_coeffs_;
  // Per mode n and step k: e^{-lambda_n (A_k - A_{k-1})} and the Simpson source increment.
  Matrix decay_;
  Matrix source_;
};

ModalTrajectory solve_mild(const DiffusionProblem& problem, const fbm::TimeGrid& tgrid,
                           std::span<const double> path,
                           const spectral::ModalCoefficients& f_coeffs,
                           const spectral::ModalCoefficients& g_coeffs);
ModalTrajectory solve_mild(const DiffusionProblem& problem, const spectral::RadialGrid& rgrid,
                           const fbm::TimeGrid& tgrid, std::span<const double> path,
                           std::size_t modes);

spectral::ModalCoefficients final_time_modes(const FieldHistory& field, std::size_t modes);

}  // namespace helios::forward
