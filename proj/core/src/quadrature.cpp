#include "dsm/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>

#include "dsm/errors.hpp"

namespace dsm {
namespace {

constexpr int kOrder = 10;

struct GaussRule {
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};
};

// Legendre roots by Newton iteration from the Chebyshev-like initial guess.
GaussRule make_rule() {
  GaussRule rule;
  for (int i = 0; i < kOrder; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= kOrder; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const GaussRule& rule() {
  static const GaussRule r = make_rule();
  return r;
}

struct PanelSum {
  double value;
  double abs_value;
};

PanelSum gauss(const ScalarFunction& f, double lo, double hi) {
  const GaussRule& r = rule();
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0, abs_sum = 0.0;
  for (int i = 0; i < kOrder; ++i) {
    const double y = f(mid + half * r.nodes[i]);
    sum += r.weights[i] * y;
    abs_sum += r.weights[i] * std::abs(y);
  }
  return {sum * half, abs_sum * std::abs(half)};
}

struct Panel {
  double lo, hi;
  double value;      // refined (two-half) estimate
  double abs_value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel make_panel(const ScalarFunction& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const PanelSum whole = gauss(f, lo, hi);
  const PanelSum left = gauss(f, lo, mid);
  const PanelSum right = gauss(f, mid, hi);
  const double refined = left.value + right.value;
  return {lo, hi, refined, left.abs_value + right.abs_value, std::abs(refined - whole.value)};
}

}  // namespace

QuadratureResult integrate(const ScalarFunction& f, double lo, double hi,
                           const QuadratureOptions& opts, const std::vector<double>& breakpoints) {
  if (!(opts.tolerance > 0.0) || opts.max_nodes < 1) {
    throw Error(ErrorKind::Input, "quadrature tolerance and node budget must be positive");
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorKind::Domain, "quadrature limits must be finite");
  }
  if (lo == hi) return {};

  std::vector<double> cuts{lo};
  for (double b : breakpoints) {
    if ((b - lo) * (hi - b) > 0.0) cuts.push_back(b);
  }
  cuts.push_back(hi);

  constexpr long kNodesPerPanel = 3 * kOrder;
  std::priority_queue<Panel> queue;
  double total_abs = 0.0, total_error = 0.0;
  long nodes = 0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    Panel p = make_panel(f, cuts[k], cuts[k + 1]);
    nodes += kNodesPerPanel;
    total_abs += p.abs_value;
    total_error += p.error;
    queue.push(p);
  }

  QuadratureResult frozen;
  auto target = [&] { return opts.tolerance * total_abs; };
  while (total_error > target() && !queue.empty()) {
    if (nodes + 2 * kNodesPerPanel > opts.max_nodes) {
      throw Error(ErrorKind::Accuracy,
                  "quadrature did not reach relative tolerance " + std::to_string(opts.tolerance) +
                      " within " + std::to_string(opts.max_nodes) + " nodes");
    }
    const Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= std::min(worst.lo, worst.hi) || mid >= std::max(worst.lo, worst.hi)) {
      // Panel at machine resolution; its estimate is final.
      total_error -= worst.error;
      frozen.value += worst.value;
      frozen.error_estimate += worst.error;
      continue;
    }
    const Panel left = make_panel(f, worst.lo, mid);
    const Panel right = make_panel(f, mid, worst.hi);
    nodes += 2 * kNodesPerPanel;
    total_abs += left.abs_value + right.abs_value - worst.abs_value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  double sum = frozen.value, err = frozen.error_estimate;
  while (!queue.empty()) {
    sum += queue.top().value;
    err += queue.top().error;
    queue.pop();
  }
  return {sum, err, nodes};
}

QuadratureResult exponential_convolution(const ScalarFunction& q, double t0, double t1,
                                         const QuadratureOptions& opts) {
  if (!(t1 >= t0)) {
    throw Error(ErrorKind::Domain, "exponential_convolution requires t1 >= t0");
  }
  // Lag variable x = t1 - s; the weight is e^{-x}.
  const double window = std::min(t1 - t0, kExponentialWindow);
  if (window == 0.0) return {};
  const ScalarFunction integrand = [&](double x) { return std::exp(-x) * q(t1 - x); };
  static const std::vector<double> grading{0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  return integrate(integrand, 0.0, window, opts, grading);
}

}  // namespace dsm
