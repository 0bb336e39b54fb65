#pragma once

#include <functional>
#include <vector>

namespace dsm {

struct QuadratureOptions {
  /// Relative tolerance, measured against the integral of |f|.
  double tolerance = 1e-10;
  /// Budget on integrand evaluations.
  long max_nodes = 4'000'000;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long nodes = 0;
};

using ScalarFunction = std::function<double(double)>;

/// Globally adaptive composite Gauss-Legendre quadrature of f over [lo, hi].
/// Panels are bisected, worst estimated error first, until the summed
/// estimate (difference between a panel rule and its two halves) drops
/// below tolerance * integral |f|. Optional interior breakpoints seed the
/// initial panel set.
///
/// Throws dsm::Error(Accuracy) when max_nodes is exhausted.
QuadratureResult integrate(const ScalarFunction& f, double lo, double hi,
                           const QuadratureOptions& opts = {},
                           const std::vector<double>& breakpoints = {});

/// Window length beyond which the weight e^{-(t-s)} is dropped; e^{-60} is
/// below 1e-26.
inline constexpr double kExponentialWindow = 60.0;

/// Integral of e^{-(t1 - s)} q(s) over [t0, t1], with the weight absorbed
/// into the integrand and panels graded toward s = t1. Contributions older
/// than kExponentialWindow are dropped.
QuadratureResult exponential_convolution(const ScalarFunction& q, double t0, double t1,
                                         const QuadratureOptions& opts = {});

/// Integral of e^{-(t - s)} q(s) over [0, t].
inline QuadratureResult exponential_convolution(const ScalarFunction& q, double t,
                                                const QuadratureOptions& opts = {}) {
  return exponential_convolution(q, 0.0, t, opts);
}

}  // namespace dsm
