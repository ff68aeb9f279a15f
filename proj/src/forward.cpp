#include "helios/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "helios/errors.hpp"

namespace helios::forward {

ProblemBounds validate(const DiffusionProblem& problem, const fbm::TimeGrid& tgrid) {
  if (!problem.a || !problem.f || !problem.g || !problem.h)
    throw DomainError("diffusion problem has an unset coefficient function");
  if (!(problem.radius > 0.0)) throw DomainError("diffusion problem needs R0 > 0");
  if (std::abs(tgrid.t_final() - problem.t_final) > 1e-12 * problem.t_final)
    throw DomainError("time grid does not end at the problem's final time");

  ProblemBounds b;
  b.a_min = std::numeric_limits<double>::infinity();
  b.a_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= tgrid.steps(); ++k) {
    const double a = problem.a(tgrid.node(k));
    if (!std::isfinite(a)) throw NumericError("diffusivity a(t) is not finite on the grid");
    b.a_min = std::min(b.a_min, a);
    b.a_max = std::max(b.a_max, a);
  }
  if (!(b.a_min > 0.0)) {
    std::ostringstream msg;
    msg << "diffusivity must satisfy a(t) >= a0 > 0 on the grid, min is " << b.a_min;
    throw DomainError(msg.str());
  }
  b.h_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= tgrid.steps(); ++k) {
    const double h = problem.h(tgrid.node(k));
    if (!std::isfinite(h)) throw NumericError("h(t) is not finite on the grid");
    b.h_min = std::min(b.h_min, h);
    b.h_sup = std::max(b.h_sup, std::abs(h));
  }
  if (problem.require_positive_h && !(b.h_min > 0.0)) {
    std::ostringstream msg;
    msg << "h(t) must have a positive lower bound C(h), min is " << b.h_min;
    throw DomainError(msg.str());
  }
  return b;
}

CumulativeIntegral::CumulativeIntegral(const TimeFunction& a, const fbm::TimeGrid& grid)
    : grid_(grid), table_(grid.size()), rate_(grid.size()) {
  const double dt = grid_.step();
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    rate_[k] = a(grid_.node(k));
    if (!std::isfinite(rate_[k])) throw NumericError("diffusivity a(t) is not finite");
  }
  table_[0] = 0.0;
  for (std::size_t k = 1; k < grid_.size(); ++k) {
    const double mid = a(0.5 * (grid_.node(k - 1) + grid_.node(k)));
    if (!std::isfinite(mid)) throw NumericError("diffusivity a(t) is not finite");
    table_[k] = table_[k - 1] + dt / 6.0 * (rate_[k - 1] + 4.0 * mid + rate_[k]);
  }
}

double CumulativeIntegral::operator()(double t) const {
  const std::size_t m = grid_.steps();
  if (t <= 0.0) return 0.0;
  if (t >= grid_.t_final()) return table_[m];
  const double dt = grid_.step();
  const auto k = std::min(static_cast<std::size_t>(t / dt), m - 1);
  const double s = (t - grid_.node(k)) / dt;
  if (s == 0.0) return table_[k];
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * table_[k] + h10 * dt * rate_[k] + h01 * table_[k + 1] + h11 * dt * rate_[k + 1];
}

CumulativeIntegral accumulate_a(const TimeFunction& a, const fbm::TimeGrid& grid) {
  return CumulativeIntegral(a, grid);
}

FdSolver::FdSolver(const DiffusionProblem& problem, spectral::RadialGrid rgrid,
                   fbm::TimeGrid tgrid)
    : rgrid_(rgrid), tgrid_(tgrid), bounds_(validate(problem, tgrid)) {
  f_nodes_.resize(rgrid_.size());
  g_nodes_.resize(rgrid_.size());
  for (std::size_t i = 0; i < rgrid_.size(); ++i) {
    f_nodes_[i] = problem.f(rgrid_.node(i));
    g_nodes_[i] = problem.g(rgrid_.node(i));
  }
  a_levels_.resize(tgrid_.size());
  h_levels_.resize(tgrid_.size());
  for (std::size_t k = 0; k < tgrid_.size(); ++k) {
    h_levels_[k] = problem.h(tgrid_.node(k));
    a_levels_[k] = k == 0 ? 0.0 : problem.a(tgrid_.node(k));
  }
}

template <typename Sink>
void FdSolver::march(std::span<const double> path, std::span<double> level, Sink&& sink) const {
  if (path.size() != tgrid_.size()) throw DataError("fBm path does not match the time grid");
  const std::size_t n_int = rgrid_.intervals() - 1;
  const double hr = rgrid_.step();
  const double ratio = hr * hr / tgrid_.step();  // h^2 / h_t
  const double hr2 = hr * hr;

  std::vector<double> sub(n_int), diag(n_int), sup(n_int), rhs(n_int), scratch(n_int);
  std::fill(level.begin(), level.end(), 0.0);
  sink(std::size_t{0}, std::span<const double>(level));

  for (std::size_t k = 1; k <= tgrid_.steps(); ++k) {
    const double a = a_levels_[k];
    const double dB = path[k] - path[k - 1];
    const double h_t = h_levels_[k];
    for (std::size_t j = 0; j < n_int; ++j) {
      const std::size_t i = j + 1;
      const double inv_i = 1.0 / static_cast<double>(i);  // h / r_i
      diag[j] = ratio + 2.0 * a;
      sub[j] = a * (inv_i - 1.0);
      sup[j] = -a * (inv_i + 1.0);
      rhs[j] = ratio * level[i] + hr2 * f_nodes_[i] * h_t + ratio * g_nodes_[i] * dB;
    }
    if (!linalg::solve_tridiagonal(sub, diag, sup, rhs, scratch)) {
      std::ostringstream msg;
      msg << "tridiagonal solve hit a zero pivot at time step " << k;
      throw NumericError(msg.str());
    }
    std::copy(rhs.begin(), rhs.end(), level.begin() + 1);
    level[0] = level[1];
    level[rgrid_.intervals()] = 0.0;
    sink(k, std::span<const double>(level));
  }
}

FieldHistory FdSolver::solve(std::span<const double> path) const {
  FieldHistory out{rgrid_, tgrid_, Matrix(tgrid_.size(), rgrid_.size())};
  std::vector<double> level(rgrid_.size());
  march(path, level, [&](std::size_t k, std::span<const double> values) {
    std::copy(values.begin(), values.end(), out.values.row(k).begin());
  });
  return out;
}

void FdSolver::solve_final(
    std::span<const double> path, std::span<double> out,
    const std::function<void(std::size_t, std::span<const double>)>& observer) const {
  if (out.size() != rgrid_.size()) throw DataError("output buffer does not match the radial grid");
  if (observer) {
    march(path, out, observer);
  } else {
    march(path, out, [](std::size_t, std::span<const double>) {});
  }
}

FieldHistory solve_fd(const DiffusionProblem& problem, const spectral::RadialGrid& rgrid,
                      const fbm::TimeGrid& tgrid, std::span<const double> path) {
  return FdSolver(problem, rgrid, tgrid).solve(path);
}

MildSolver::MildSolver(const DiffusionProblem& problem, fbm::TimeGrid tgrid,
                       spectral::ModalCoefficients f_coeffs,
                       spectral::ModalCoefficients g_coeffs)
    : tgrid_(tgrid), f_coeffs_(std::move(f_coeffs)), g_coeffs_(std::move(g_coeffs)) {
  if (f_coeffs_.size() != g_coeffs_.size())
    throw DataError("f and g coefficient vectors differ in length");
  validate(problem, tgrid_);
  const CumulativeIntegral cumulative(problem.a, tgrid_);
  const std::size_t modes = f_coeffs_.size();
  const std::size_t m = tgrid_.steps();
  const double dt = tgrid_.step();
  decay_ = Matrix(modes, m);
  source_ = Matrix(modes, m);

  std::vector<double> h_nodes(tgrid_.size()), h_mid(m), a_mid(m);
  for (std::size_t k = 0; k < tgrid_.size(); ++k) h_nodes[k] = problem.h(tgrid_.node(k));
  for (std::size_t k = 0; k < m; ++k) {
    const double mid = 0.5 * (tgrid_.node(k) + tgrid_.node(k + 1));
    h_mid[k] = problem.h(mid);
    a_mid[k] = cumulative(mid);
  }
  for (std::size_t n = 1; n <= modes; ++n) {
    const double lambda = spectral::eigenvalue(n, problem.radius);
    auto decay = decay_.row(n - 1);
    auto source = source_.row(n - 1);
    for (std::size_t k = 0; k < m; ++k) {
      const double end = cumulative.at_node(k + 1);
      const double full = std::exp(-lambda * (end - cumulative.at_node(k)));
      const double half = std::exp(-lambda * (end - a_mid[k]));
      decay[k] = full;
      source[k] = dt / 6.0 * (h_nodes[k] * full + 4.0 * h_mid[k] * half + h_nodes[k + 1]);
    }
  }
}

ModalTrajectory MildSolver::solve(std::span<const double> path) const {
  if (path.size() != tgrid_.size()) throw DataError("fBm path does not match the time grid");
  const std::size_t modes = f_coeffs_.size();
  ModalTrajectory out{tgrid_, Matrix(tgrid_.size(), modes)};
  for (std::size_t n = 0; n < modes; ++n) {
    const auto decay = decay_.row(n);
    const auto source = source_.row(n);
    const double fn = f_coeffs_.values[n];
    const double gn = g_coeffs_.values[n];
    double deterministic = 0.0;
    double stochastic = 0.0;
    for (std::size_t k = 0; k < tgrid_.steps(); ++k) {
      deterministic = decay[k] * deterministic + source[k];
      stochastic = decay[k] * (stochastic + (path[k + 1] - path[k]));
      out.coeffs(k + 1, n) = fn * deterministic + gn * stochastic;
    }
  }
  return out;
}

void MildSolver::solve_final(std::span<const double> path, std::span<double> out) const {
  if (path.size() != tgrid_.size()) throw DataError("fBm path does not match the time grid");
  for (std::size_t n = 0; n < f_coeffs_.size(); ++n) {
    const auto decay = decay_.row(n);
    const auto source = source_.row(n);
    double deterministic = 0.0;
    double stochastic = 0.0;
    for (std::size_t k = 0; k < tgrid_.steps(); ++k) {
      deterministic = decay[k] * deterministic + source[k];
      stochastic = decay[k] * (stochastic + (path[k + 1] - path[k]));
    }
    out[n] = f_coeffs_.values[n] * deterministic + g_coeffs_.values[n] * stochastic;
  }
}

ModalTrajectory solve_mild(const DiffusionProblem& problem, const fbm::TimeGrid& tgrid,
                           std::span<const double> path,
                           const spectral::ModalCoefficients& f_coeffs,
                           const spectral::ModalCoefficients& g_coeffs) {
  return MildSolver(problem, tgrid, f_coeffs, g_coeffs).solve(path);
}

ModalTrajectory solve_mild(const DiffusionProblem& problem, const spectral::RadialGrid& rgrid,
                           const fbm::TimeGrid& tgrid, std::span<const double> path,
                           std::size_t modes) {
  const spectral::ModeBasis basis(rgrid, modes);
  std::vector<double> f_nodes(rgrid.size()), g_nodes(rgrid.size());
  for (std::size_t i = 0; i < rgrid.size(); ++i) {
    f_nodes[i] = problem.f(rgrid.node(i));
    g_nodes[i] = problem.g(rgrid.node(i));
  }
  return solve_mild(problem, tgrid, path, basis.project(f_nodes), basis.project(g_nodes));
}

spectral::ModalCoefficients final_time_modes(const FieldHistory& field, std::size_t modes) {
  return spectral::ModeBasis(field.rgrid, modes).project(field.final_level());
}

}  // namespace helios::forward
