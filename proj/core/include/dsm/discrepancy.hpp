#pragma once

#include <cmath>
#include <string_view>

#include "dsm/linalg.hpp"
#include "dsm/operator_core.hpp"
#include "dsm/quadrature.hpp"
#include "dsm/schedule.hpp"

namespace dsm {

struct DiscrepancyConfig {
  /// Discrepancy level multiplier, 1 < c < 2.
  double c = 1.5;
  /// Relative tolerance on the achieved discrepancy value.
  double root_tolerance = 1e-8;
  int max_bisection_steps = 200;

  /// Throws dsm::Error(Input) if any field is out of range.
  void validate() const;
};

enum class StoppingRule { Integral, Root };

std::string_view to_string(StoppingRule rule) noexcept;

struct StoppingRecord {
  StoppingRule rule = StoppingRule::Root;
  double t_delta = 0.0;
  double a_delta = 0.0;
  double achieved_discrepancy = 0.0;
};

struct PsiValue {
  double psi;
  double discrepancy;
};

/// Spectral measure of f_delta with respect to Q = AA^*: eigenvalues s_i
/// and weights (u_i^T f_delta)^2. Every discrepancy quantity is a finite
/// sum over these pairs.
class DataSpectrum {
 public:
  DataSpectrum(const SpectralFactorization& fact, const Vector& f_delta);

  /// psi(a) = sum_i w_i (a / (s_i + a))^2 = ||a Q_a^{-1} f_delta||^2.
  /// Nondecreasing in a, also in floating point.
  double psi(double a) const;
  double discrepancy(double a) const { return std::sqrt(psi(a)); }
  /// d psi / da = sum_i w_i 2 a s_i / (s_i + a)^3.
  double psi_derivative(double a) const;

  /// ||f_delta||^2 = psi(+inf).
  double norm_squared() const noexcept { return norm_squared_; }
  /// ||P f_delta||^2 = psi(0+).
  double null_norm_squared() const noexcept { return null_norm_squared_; }
  /// sigma_1^2
  double spectral_bound() const noexcept { return spectral_bound_; }

 private:
  Vector eigenvalues_;
  Vector weights_;
  double norm_squared_ = 0.0;
  double null_norm_squared_ = 0.0;
  double spectral_bound_ = 0.0;
};

/// psi(a) and the discrepancy a ||Q_a^{-1} f_delta||. Throws Domain on a <= 0.
PsiValue psi(const SpectralFactorization& fact, const Vector& f_delta, double a);

/// Root a_delta of a ||Q_a^{-1} f_delta|| = c delta.
///
/// Brackets geometrically from [1e-12 sigma_1^2, 1e6 sigma_1^2], then
/// bisects in log a down to machine resolution; the root tolerance is
/// checked on the result.
///
/// Throws NoiseDominates if ||f_delta|| <= c delta (the zero reconstruction
/// is the only defensible answer), InconsistentData if ||P f_delta|| >= c delta.
double solve_a_delta(const SpectralFactorization& fact, const Vector& f_delta, double delta,
                     const DiscrepancyConfig& cfg = {});

/// h(t) = a(t) ||Q_{a(t)}^{-1} f_delta||
double h_value(const Schedule& s, const SpectralFactorization& fact, const Vector& f_delta,
               double t);

/// (h^2)' / h^2 at t, from the analytic derivative of psi along a(t).
/// Zero when h(t) = 0.
double h_squared_rate(const Schedule& s, const SpectralFactorization& fact,
                      const Vector& f_delta, double t);

struct CrossingOptions {
  double tolerance = 1e-8;
  int max_bisection_steps = 200;
  QuadratureOptions quadrature{1e-12, 4'000'000};
};

struct Crossing {
  double time;
  double value;
};

/// Final crossing of G(t) = int_0^t e^{-(t-s)} h(s) ds through `level`,
/// for nonincreasing h with limit `h_limit` at infinity.
///
/// G starts at 0, so when h(0) > level > h_limit it rises through the
/// level early and falls back through it once G tracks h; the stopping
/// time is the last crossing, beyond which G stays on one side of the
/// level. The march stops once that is certain: G < level with
/// h(t) <= level, or G >= level with h_limit >= level.
///
/// G is advanced along G' = -G + h in variation-of-constants form,
///   G(t + dt) = e^{-dt} G(t) + int_t^{t+dt} e^{-(t+dt-s)} h(s) ds,
/// with dt bounded by max_step(t); each step that changes side is refined
/// by bisection on the same formula (exact dense output).
///
/// Throws HorizonExceeded if the march is undecided at t_max,
/// Configuration if G never reaches the level, and Accuracy if a crossing
/// cannot be resolved to the tolerance.
Crossing settled_crossing(const ScalarFunction& h, double h_limit, double level, double t_max,
                          const ScalarFunction& max_step, const CrossingOptions& opts = {});

/// Stopping time t_delta solving int_0^t e^{-(t-s)} h(s) ds = c delta.
///
/// Requires ||f_delta|| > c delta, ||P f_delta|| < c delta and h(0) > c delta;
/// the last fails with Configuration (increase c0 so that a(0) >= sigma_1^2).
StoppingRecord integral_stopping_time(const Schedule& s, const SpectralFactorization& fact,
                                      const Vector& f_delta, double delta,
                                      const DiscrepancyConfig& cfg, double t_max,
                                      const QuadratureOptions& quad = {1e-12, 4'000'000});

struct ResidualIdentity {
  double lhs;  // a ||Q_a^{-1} f_delta||, spectral
  double rhs;  // ||A T_a^{-1} A^* f_delta - f_delta||, explicit operator products
};

/// Both sides of the residual identity. Throws Domain on a <= 0.
ResidualIdentity residual_identity(const DenseOperator& op, const SpectralFactorization& fact,
                                   const Vector& f_delta, double a);

/// As above with A reassembled from the factorization.
ResidualIdentity residual_identity(const SpectralFactorization& fact, const Vector& f_delta,
                                   double a);

}  // namespace dsm
