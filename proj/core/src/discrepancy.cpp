#include "dsm/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "dsm/errors.hpp"

namespace dsm {
namespace {

void require_positive(double a, const char* what) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw Error(ErrorKind::Domain, std::string(what) + " must be positive and finite");
  }
}

// Shared precondition checks of both discrepancy rules.
void check_data(const DataSpectrum& spec, double delta, const DiscrepancyConfig& cfg) {
  cfg.validate();
  require_positive(delta, "noise level delta");
  const double level = cfg.c * delta;
  if (std::sqrt(spec.norm_squared()) <= level) {
    throw Error(ErrorKind::NoiseDominates,
                "||f_delta|| <= c*delta: noise dominates the data, return u = 0");
  }
  if (std::sqrt(spec.null_norm_squared()) >= level) {
    throw Error(ErrorKind::InconsistentData,
                "||P f_delta|| >= c*delta: data is not consistent with noise level delta");
  }
}

}  // namespace

void DiscrepancyConfig::validate() const {
  if (!(c > 1.0 && c < 2.0)) {
    throw Error(ErrorKind::Input, "discrepancy constant c must lie in (1, 2), got " + std::to_string(c));
  }
  if (!(root_tolerance > 0.0)) {
    throw Error(ErrorKind::Input, "root tolerance must be positive");
  }
  if (max_bisection_steps < 1) {
    throw Error(ErrorKind::Input, "max_bisection_steps must be positive");
  }
}

std::string_view to_string(StoppingRule rule) noexcept {
  return rule == StoppingRule::Integral ? "integral" : "root";
}

DataSpectrum::DataSpectrum(const SpectralFactorization& fact, const Vector& f_delta)
    : eigenvalues_(fact.gram_eigenvalues()),
      weights_(fact.data_coefficients(f_delta).array().square().matrix()),
      spectral_bound_(fact.spectral_bound()) {
  norm_squared_ = weights_.sum();
  const Eigen::Index r = fact.rank();
  null_norm_squared_ = weights_.tail(weights_.size() - r).sum();
}

double DataSpectrum::psi(double a) const {
  require_positive(a, "regularization parameter a");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    const double filter = 1.0 / (1.0 + eigenvalues_(i) / a);
    sum += weights_(i) * filter * filter;
  }
  return sum;
}

double DataSpectrum::psi_derivative(double a) const {
  require_positive(a, "regularization parameter a");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    const double d = eigenvalues_(i) + a;
    sum += weights_(i) * 2.0 * a * eigenvalues_(i) / (d * d * d);
  }
  return sum;
}

PsiValue psi(const SpectralFactorization& fact, const Vector& f_delta, double a) {
  const double value = DataSpectrum(fact, f_delta).psi(a);
  return {value, std::sqrt(value)};
}

double solve_a_delta(const SpectralFactorization& fact, const Vector& f_delta, double delta,
                     const DiscrepancyConfig& cfg) {
  const DataSpectrum spec(fact, f_delta);
  check_data(spec, delta, cfg);
  const double level = cfg.c * delta;
  const double scale = spec.spectral_bound();

  double lo = 1e-12 * scale;
  while (spec.discrepancy(lo) >= level) {
    lo *= 1e-3;
    if (lo < 1e-300) {
      throw Error(ErrorKind::Accuracy, "could not bracket a_delta from below");
    }
  }
  double hi = 1e6 * scale;
  while (spec.discrepancy(hi) <= level) {
    hi *= 1e3;
    if (hi > 1e300) {
      throw Error(ErrorKind::Accuracy, "could not bracket a_delta from above");
    }
  }

  // Bisection in log a; discrepancy(lo) < level < discrepancy(hi) throughout.
  for (int step = 0; step < cfg.max_bisection_steps; ++step) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (!(mid > lo && mid < hi)) break;
    if (spec.discrepancy(mid) < level) lo = mid;
    else hi = mid;
  }
  const double err_lo = std::abs(spec.discrepancy(lo) - level);
  const double err_hi = std::abs(spec.discrepancy(hi) - level);
  const double root = err_lo <= err_hi ? lo : hi;
  if (std::min(err_lo, err_hi) > cfg.root_tolerance * level) {
    throw Error(ErrorKind::Accuracy, "a_delta bisection did not reach the root tolerance");
  }
  return root;
}

double h_value(const Schedule& s, const SpectralFactorization& fact, const Vector& f_delta,
               double t) {
  return DataSpectrum(fact, f_delta).discrepancy(s.eval(t).a);
}

double h_squared_rate(const Schedule& s, const SpectralFactorization& fact,
                      const Vector& f_delta, double t) {
  const DataSpectrum spec(fact, f_delta);
  const auto [a, a_dot] = s.eval(t);
  const double p = spec.psi(a);
  if (p == 0.0) return 0.0;
  return a_dot * spec.psi_derivative(a) / p;
}

Crossing settled_crossing(const ScalarFunction& h, double h_limit, double level, double t_max,
                          const ScalarFunction& max_step, const CrossingOptions& opts) {
  if (!(level > 0.0) || !(t_max > 0.0)) {
    throw Error(ErrorKind::Domain, "settled_crossing requires level > 0 and t_max > 0");
  }
  // G(t1) given G(t0).
  auto advance = [&](double t0, double g0, double t1) {
    return std::exp(-(t1 - t0)) * g0 + exponential_convolution(h, t0, t1, opts.quadrature).value;
  };
  // Bisection for G = level inside [t0, t1], G(t0) = g0 on one side.
  auto localize = [&](double t0, double g0, double t1, double g1) {
    const bool rising = g0 < level;
    double lo = t0, hi = t1, g_lo = g0, g_hi = g1;
    for (int step = 0; step < opts.max_bisection_steps; ++step) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      const double g_mid = advance(t0, g0, mid);
      if ((g_mid < level) == rising) {
        lo = mid;
        g_lo = g_mid;
      } else {
        hi = mid;
        g_hi = g_mid;
      }
    }
    const bool take_hi = std::abs(g_hi - level) <= std::abs(g_lo - level);
    const Crossing c{take_hi ? hi : lo, take_hi ? g_hi : g_lo};
    if (std::abs(c.value - level) > opts.tolerance * level) {
      throw Error(ErrorKind::Accuracy, "discrepancy crossing not resolved to tolerance");
    }
    return c;
  };

  std::optional<Crossing> last;
  double t = 0.0;
  double g = 0.0;
  while (true) {
    const bool above = g >= level;
    if (!above && t > 0.0 && h(t) <= level) break;
    if (above && h_limit >= level) break;
    if (t >= t_max) {
      throw Error(ErrorKind::HorizonExceeded,
                  "integral discrepancy not settled by t_max = " + std::to_string(t_max));
    }
    const double dt = max_step(t);
    if (!(dt > 0.0)) throw Error(ErrorKind::Domain, "step bound must be positive");
    const double t_next = std::min(t + dt, t_max);
    const double g_next = advance(t, g, t_next);
    if ((g_next >= level) != above) last = localize(t, g, t_next, g_next);
    t = t_next;
    g = g_next;
  }
  if (!last) {
    throw Error(ErrorKind::Configuration,
                "integral discrepancy never reached the level; increase c0");
  }
  return *last;
}

StoppingRecord integral_stopping_time(const Schedule& s, const SpectralFactorization& fact,
                                      const Vector& f_delta, double delta,
                                      const DiscrepancyConfig& cfg, double t_max,
                                      const QuadratureOptions& quad) {
  const DataSpectrum spec(fact, f_delta);
  check_data(spec, delta, cfg);
  const double level = cfg.c * delta;
  const auto h = [&](double t) { return spec.discrepancy(s.eval(t).a); };
  if (h(0.0) <= level) {
    throw Error(ErrorKind::Configuration,
                "h(0) <= c*delta so the integral discrepancy never reaches c*delta; increase c0 "
                "so that a(0) >= sigma_1^2 = " + std::to_string(spec.spectral_bound()));
  }
  // h varies on the time scale a / |a_dot|; G relaxes on the unit scale.
  const auto step = [&](double t) {
    const auto [a, a_dot] = s.eval(t);
    return std::max(0.05, 0.05 * a / std::abs(a_dot));
  };
  const CrossingOptions opts{cfg.root_tolerance, cfg.max_bisection_steps, quad};
  const Crossing c = settled_crossing(h, std::sqrt(spec.null_norm_squared()), level, t_max, step, opts);
  return {StoppingRule::Integral, c.time, s.eval(c.time).a, c.value};
}

ResidualIdentity residual_identity(const DenseOperator& op, const SpectralFactorization& fact,
                                   const Vector& f_delta, double a) {
  require_positive(a, "regularization parameter a");
  const double lhs = a * gram_shifted_inverse_apply(fact, a, f_delta).norm();
  const Vector w = regularized_solution(fact, a, f_delta);
  const double rhs = (op.apply(w) - f_delta).norm();
  return {lhs, rhs};
}

ResidualIdentity residual_identity(const SpectralFactorization& fact, const Vector& f_delta,
                                   double a) {
  return residual_identity(DenseOperator(fact.reconstruct()), fact, f_delta, a);
}

}  // namespace dsm
