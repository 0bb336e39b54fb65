#pragma once

#include <optional>

#include "dsm/discrepancy.hpp"
#include "dsm/linalg.hpp"
#include "dsm/operator_core.hpp"
#include "dsm/problems.hpp"
#include "dsm/quadrature.hpp"
#include "dsm/schedule.hpp"

namespace dsm {

struct IntegratorConfig {
  /// Initial state u(0); an empty vector means zero.
  Vector u0;
  double quad_tolerance = 1e-10;
  long max_nodes = 4'000'000;
};

struct DsmResult {
  Vector u_delta;
  StoppingRecord stopping;
  std::optional<double> error_to_y;
  double residual_norm = 0.0;
  double delta_over_sqrt_a = 0.0;
};

/// w(t) = T_{a(t)}^{-1} A^* f_delta
Vector w_trajectory(const Schedule& s, const SpectralFactorization& fact, const Vector& f_delta,
                    double t);

/// u(t_end) of u' = -u + T_{a(t)}^{-1} A^* f_delta, u(0) = u0, through the
/// variation-of-constants formula. In the singular basis each component is
///   e^{-t} (v_i^T u0) + sigma_i (u_i^T f_delta) int_0^t e^{-(t-s)} / (sigma_i^2 + a(s)) ds
/// and the scalar integrals are computed by adaptive Gauss-Legendre panels.
/// `a_of_t` may be any positive regularization path.
Vector integrate_u(const ScalarFunction& a_of_t, const SpectralFactorization& fact,
                   const Vector& f_delta, const IntegratorConfig& cfg, double t_end);

Vector integrate_u(const Schedule& s, const SpectralFactorization& fact, const Vector& f_delta,
                   const IntegratorConfig& cfg, double t_end);

inline constexpr double kDefaultTimeHorizon = 1e16;

/// Integral discrepancy rule: t_delta from integral_stopping_time, then
/// u_delta = u(t_delta).
DsmResult solve_theorem1(const ProblemInstance& problem, const NoisyObservation& noisy,
                         const Schedule& s, const DiscrepancyConfig& cfg = {},
                         const IntegratorConfig& icfg = {}, double t_max = kDefaultTimeHorizon);

/// Root discrepancy rule: a_delta from solve_a_delta, t_delta = a^{-1}(a_delta),
/// u_delta = u(t_delta). Throws Configuration if the schedule's |a_dot|/a^2
/// is not decreasing, or if a(0) < a_delta.
DsmResult solve_theorem2(const ProblemInstance& problem, const NoisyObservation& noisy,
                         const Schedule& s, const DiscrepancyConfig& cfg = {},
                         const IntegratorConfig& icfg = {});

/// dw/dt = -a_dot T_a^{-2} A^* f_delta
Vector w_dot(const Schedule& s, const SpectralFactorization& fact, const Vector& f_delta, double t);

struct WDotDiagnostic {
  double w_dot_norm;
  double bound;  // |a_dot| / a^2 * ||A^* f_delta||
  bool holds;    // w_dot_norm <= bound * (1 + 1e-12)
};

WDotDiagnostic w_dot_diagnostic(const Schedule& s, const SpectralFactorization& fact,
                                const Vector& f_delta, double t);

}  // namespace dsm
