#include "dsm/dsm_solver.hpp"

#include <cmath>
#include <string>

#include "dsm/errors.hpp"

namespace dsm {
namespace {

DsmResult finish(const ProblemInstance& problem, const NoisyObservation& noisy,
                 StoppingRecord stopping, Vector u) {
  DsmResult r;
  r.residual_norm = (problem.op.apply(u) - noisy.f_delta).norm();
  if (problem.y) r.error_to_y = (u - *problem.y).norm();
  r.delta_over_sqrt_a = noisy.delta / std::sqrt(stopping.a_delta);
  r.stopping = stopping;
  r.u_delta = std::move(u);
  return r;
}

}  // namespace

Vector w_trajectory(const Schedule& s, const SpectralFactorization& fact, const Vector& f_delta,
                    double t) {
  return regularized_solution(fact, s.eval(t).a, f_delta);
}

Vector integrate_u(const ScalarFunction& a_of_t, const SpectralFactorization& fact,
                   const Vector& f_delta, const IntegratorConfig& cfg, double t_end) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorKind::Domain, "integrate_u requires a positive finite end time");
  }
  const Eigen::Index n = fact.cols();
  if (cfg.u0.size() != 0 && cfg.u0.size() != n) {
    throw Error(ErrorKind::Input, "u0 must have length " + std::to_string(n));
  }
  const QuadratureOptions quad{cfg.quad_tolerance, cfg.max_nodes};

  Vector coeff = Vector::Zero(n);
  if (cfg.u0.size() == n) coeff = std::exp(-t_end) * fact.solution_coefficients(cfg.u0);

  const Vector data = fact.data_coefficients(f_delta);
  const Vector& sigma = fact.singular_values();
  for (Eigen::Index i = 0; i < fact.spectral_size(); ++i) {
    const double forcing = sigma(i) * data(i);
    if (forcing == 0.0) continue;
    const double s = sigma(i) * sigma(i);
    const auto kernel = [&](double time) { return 1.0 / (s + a_of_t(time)); };
    coeff(i) += forcing * exponential_convolution(kernel, t_end, quad).value;
  }
  return fact.right_vectors() * coeff;
}

Vector integrate_u(const Schedule& s, const SpectralFactorization& fact, const Vector& f_delta,
                   const IntegratorConfig& cfg, double t_end) {
  return integrate_u([&s](double t) { return s.eval(t).a; }, fact, f_delta, cfg, t_end);
}

DsmResult solve_theorem1(const ProblemInstance& problem, const NoisyObservation& noisy,
                         const Schedule& s, const DiscrepancyConfig& cfg,
                         const IntegratorConfig& icfg, double t_max) {
  const QuadratureOptions quad{std::min(icfg.quad_tolerance, 1e-12), icfg.max_nodes};
  const StoppingRecord stop =
      integral_stopping_time(s, problem.fact, noisy.f_delta, noisy.delta, cfg, t_max, quad);
  Vector u = integrate_u(s, problem.fact, noisy.f_delta, icfg, stop.t_delta);
  return finish(problem, noisy, stop, std::move(u));
}

DsmResult solve_theorem2(const ProblemInstance& problem, const NoisyObservation& noisy,
                         const Schedule& s, const DiscrepancyConfig& cfg,
                         const IntegratorConfig& icfg) {
  const ScheduleConditionReport conditions = s.check_conditions(1e6, 64);
  if (!conditions.rate_squared_decreasing) {
    throw Error(ErrorKind::Configuration, "schedule violates the |a_dot|/a^2 -> 0 condition");
  }
  const double a_delta = solve_a_delta(problem.fact, noisy.f_delta, noisy.delta, cfg);
  double t_delta = 0.0;
  try {
    t_delta = s.inverse_time(a_delta);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoSolution) throw;
    throw Error(ErrorKind::Configuration,
                "a(0) < a_delta = " + std::to_string(a_delta) + "; increase c0");
  }
  StoppingRecord stop{StoppingRule::Root, t_delta, a_delta,
                      DataSpectrum(problem.fact, noisy.f_delta).discrepancy(a_delta)};
  Vector u = t_delta > 0.0 ? integrate_u(s, problem.fact, noisy.f_delta, icfg, t_delta)
                           : (icfg.u0.size() ? icfg.u0 : Vector::Zero(problem.fact.cols()));
  return finish(problem, noisy, stop, std::move(u));
}

Vector w_dot(const Schedule& s, const SpectralFactorization& fact, const Vector& f_delta, double t) {
  const auto [a, a_dot] = s.eval(t);
  const Vector data = fact.data_coefficients(f_delta);
  const Eigen::Index p = fact.spectral_size();
  const auto sigma = fact.singular_values().array();
  const Vector coeff =
      (-a_dot * sigma * data.head(p).array() / (sigma.square() + a).square()).matrix();
  return fact.right_vectors().leftCols(p) * coeff;
}

WDotDiagnostic w_dot_diagnostic(const Schedule& s, const SpectralFactorization& fact,
                                const Vector& f_delta, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::Domain, "w_dot_diagnostic requires t > 0");
  const auto [a, a_dot] = s.eval(t);
  const Vector data = fact.data_coefficients(f_delta);
  const Eigen::Index p = fact.spectral_size();
  const double adjoint_norm =
      (fact.singular_values().array() * data.head(p).array()).matrix().norm();
  const double norm = w_dot(s, fact, f_delta, t).norm();
  const double bound = std::abs(a_dot) / (a * a) * adjoint_norm;
  return {norm, bound, norm <= bound * (1.0 + 1e-12)};
}

}  // namespace dsm
