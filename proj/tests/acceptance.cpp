// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dsm/discrepancy.hpp"
#include "dsm/dsm_solver.hpp"
#include "dsm/harness.hpp"
#include "dsm/operator_core.hpp"
#include "dsm/problems.hpp"
#include "dsm/quadrature.hpp"
#include "dsm/schedule.hpp"
#include "oracles.hpp"

using namespace dsm;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out;
  for (int k = 0; k < points; ++k)
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1)));
  return out;
}

SpectralFactorization scalar_fact(double value) {
  return factorize(DenseOperator(Matrix::Constant(1, 1, value)));
}

// Seeded random problem of modest size, possibly rank deficient.
Matrix random_matrix(std::uint64_t seed) {
  const Eigen::Index m = 4 + static_cast<Eigen::Index>((seed * 7) % 61);
  const Eigen::Index n = 3 + static_cast<Eigen::Index>((seed * 13) % 62);
  if (seed % 3 == 2) return oracle::low_rank(m, n, std::min(m, n) / 2 + 1, seed);
  return oracle::gaussian(m, n, seed);
}

Outcome residual_identity_check() {
  Outcome out;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseOperator op(random_matrix(seed));
    const auto fact = factorize(op);
    const Vector f = oracle::gaussian_vector(op.rows(), 500 + seed);
    for (double a : log_grid(1e-8, 1.0, 10)) {
      const auto r = residual_identity(op, fact, f, a);
      worst = std::max(worst, std::abs(r.lhs - r.rhs) / f.norm());
    }
  }
  out.require(worst <= 1e-10, "worst relative gap " + fmt(worst));
  out.detail += out.detail.empty() ? "worst " + fmt(worst) : "";
  return out;
}

Outcome psi_structure_check() {
  Outcome out;
  double worst_limit = 0.0, worst_null = 0.0;
  bool monotone = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix a = random_matrix(seed);
    const auto fact = factorize(DenseOperator(a));
    const Vector y = oracle::gaussian_vector(a.cols(), 600 + seed);
    const Vector exact = a * y;
    const double delta = 1e-3 * exact.norm();
    Vector noise = oracle::gaussian_vector(a.rows(), 700 + seed);
    const Vector f = exact + delta * noise / noise.norm();
    const DataSpectrum spec(fact, f);
    const double s1 = spec.spectral_bound();
    double prev = 0.0;
    for (double alpha : log_grid(1e-12 * s1, 1e6 * s1, 1000)) {
      const double p = spec.psi(alpha);
      if (p < prev) monotone = false;
      prev = p;
    }
    worst_limit = std::max(worst_limit, std::abs(spec.psi(1e6 * s1) - f.squaredNorm()) / f.squaredNorm());
    worst_null = std::max(worst_null, null_projection(fact, f).norm() / delta);
  }
  out.require(monotone, "psi not monotone");
  out.require(worst_limit <= 1e-5, "upper limit gap " + fmt(worst_limit));
  out.require(worst_null <= 1.0, "||Pf||/delta " + fmt(worst_null));
  if (out.passed) out.detail = "limit gap " + fmt(worst_limit) + ", max ||Pf||/delta " + fmt(worst_null);
  return out;
}

Outcome operator_bound_check() {
  Outcome out;
  double worst = 0.0, worst_equal = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix a = random_matrix(seed);
    const auto fact = factorize(DenseOperator(a));
    const Vector f = oracle::gaussian_vector(a.rows(), 800 + seed);
    for (double alpha : log_grid(1e-8, 1.0, 50)) {
      const double r = regularized_solution(fact, alpha, f).norm() * 2.0 * std::sqrt(alpha) / f.norm();
      worst = std::max(worst, r);
    }
    for (Eigen::Index i = 0; i < fact.rank(); ++i) {
      const double s = fact.singular_values()(i);
      const Vector ui = fact.left_vectors().col(i);
      const double r = regularized_solution(fact, s * s, ui).norm() * 2.0 * s;
      worst_equal = std::max(worst_equal, std::abs(r - 1.0));
    }
  }
  out.require(worst <= 1.0 + 1e-12, "max ratio " + fmt(worst));
  out.require(worst_equal <= 1e-6, "equality gap " + fmt(worst_equal));
  if (out.passed) out.detail = "max ratio " + fmt(worst) + ", equality gap " + fmt(worst_equal);
  return out;
}

Outcome root_solver_check() {
  Outcome out;
  const double scalar_root = solve_a_delta(scalar_fact(1.0), Vector::Ones(1), 0.1);
  const double scalar_gap = std::abs(scalar_root - 3.0 / 17.0);
  out.require(scalar_gap <= 1e-10, "scalar gap " + fmt(scalar_gap));

  const double delta = 1e-3, level = 1.5 * delta;
  const long points = 1'000'000;
  const double lo = std::log(1e-14), hi = std::log(10.0);
  const double step = (hi - lo) / (points - 1);
  double worst_steps = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Matrix a = oracle::gaussian(8, 8, 900 + seed);
    const auto fact = factorize(DenseOperator(a));
    Vector f = a * oracle::gaussian_vector(8, 950 + seed);
    f *= 0.1 / f.norm();
    const double root = solve_a_delta(fact, f, delta);
    // Brute-force discrepancy from an independent Eigen SVD.
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU);
    const Vector coef = svd.matrixU().transpose() * f;
    const Vector sig = svd.singularValues();
    auto disc = [&](double alpha) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < coef.size(); ++i) acc += std::pow(alpha / (sig(i) * sig(i) + alpha) * coef(i), 2);
      return std::sqrt(acc);
    };
    double best = 0.0, best_gap = INFINITY;
    for (long k = 0; k < points; ++k) {
      const double alpha = std::exp(lo + step * static_cast<double>(k));
      const double gap = std::abs(disc(alpha) - level);
      if (gap < best_gap) {
        best_gap = gap;
        best = alpha;
      }
    }
    worst_steps = std::max(worst_steps, std::abs(std::log(root / best)) / step);
  }
  out.require(worst_steps <= 1.0, "grid distance " + fmt(worst_steps) + " cells");
  if (out.passed) out.detail = "scalar gap " + fmt(scalar_gap) + ", grid distance " + fmt(worst_steps) + " cells";
  return out;
}

Outcome integral_rule_check() {
  Outcome out;
  const auto c = settled_crossing([](double) { return 1.0; }, 1.0, 0.5, 1e6, [](double) { return 0.05; });
  const double stub_gap = std::abs(c.time + std::log(1.0 - 0.5));
  out.require(stub_gap <= 1e-8, "stub gap " + fmt(stub_gap));

  const Schedule s = Schedule::standard();
  const auto fact = scalar_fact(1.0);
  const Vector f = Vector::Ones(1);
  const double delta = 0.05;
  const auto rec = integral_stopping_time(s, fact, f, delta, {}, 1e16);
  const auto h = [&](double t) { const double a = s(t); return a / (1.0 + a); };
  const double ref = oracle::last_crossing(h, 1.5 * delta, 400.0, 1.0, 100'000);
  const double rel = std::abs(rec.t_delta - ref) / ref;
  out.require(rel <= 1e-6, "scalar relative gap " + fmt(rel));
  if (out.passed) out.detail = "stub gap " + fmt(stub_gap) + ", t_delta " + fmt(rec.t_delta) + " rel gap " + fmt(rel);
  return out;
}

Outcome integrator_check() {
  Outcome out;
  const Matrix a = oracle::gaussian(5, 4, 31);
  const auto fact = factorize(DenseOperator(a));
  IntegratorConfig cfg;
  cfg.u0 = oracle::gaussian_vector(4, 32);
  const Vector hom = integrate_u(Schedule::standard(), fact, Vector::Zero(5), cfg, 1.0);
  const double hom_gap = (hom - std::exp(-1.0) * cfg.u0).norm() / cfg.u0.norm();
  out.require(hom_gap <= 1e-10, "homogeneous gap " + fmt(hom_gap));

  const Vector f = oracle::gaussian_vector(5, 33);
  const double alpha = 0.2;
  const Vector w = (a.transpose() * a + alpha * Matrix::Identity(4, 4)).ldlt().solve(a.transpose() * f);
  double frozen_gap = 0.0;
  for (double t : {0.3, 2.0, 25.0}) {
    const Vector u = integrate_u([&](double) { return alpha; }, fact, f, cfg, t);
    const Vector expected = std::exp(-t) * cfg.u0 - std::expm1(-t) * w;
    frozen_gap = std::max(frozen_gap, (u - expected).norm() / expected.norm());
  }
  out.require(frozen_gap <= 1e-10, "frozen gap " + fmt(frozen_gap));

  const Schedule s = Schedule::standard();
  const double u = integrate_u(s, scalar_fact(1.0), Vector::Ones(1), {}, 10.0)(0);
  const double ref = oracle::trapezoid([&](double r) { return std::exp(-(10.0 - r)) / (1.0 + s(r)); }, 0.0, 10.0, 1'000'000);
  const double rel = std::abs(u - ref) / ref;
  out.require(rel <= 1e-8, "power schedule rel gap " + fmt(rel));
  if (out.passed)
    out.detail = "homogeneous " + fmt(hom_gap) + ", frozen " + fmt(frozen_gap) + ", power rel " + fmt(rel);
  return out;
}

Outcome convergence_check() {
  Outcome out;
  for (const char* problem : {"synthetic", "gravity"}) {
    SweepConfig cfg;
    cfg.problem = problem;
    cfg.n = 32;
    cfg.deltas = {1e-1, 1e-2, 1e-3, 1e-4};
    cfg.rule = RuleSelection::Both;
    cfg.record_timing = false;
    const auto report = run_sweep(cfg);
    for (StoppingRule rule : {StoppingRule::Integral, StoppingRule::Root}) {
      std::vector<SweepRow> rows;
      for (const auto& r : report.rows)
        if (r.rule == rule) rows.push_back(r);
      const std::string tag = std::string(problem) + "/" + std::string(to_string(rule));
      bool ok = rows.size() == 4;
      for (const auto& r : rows) ok = ok && r.status == "ok";
      out.require(ok, tag + " failed rows");
      if (!ok) continue;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        out.require(rows[i].error < rows[i - 1].error, tag + " error not decreasing");
        out.require(rows[i].t_delta > rows[i - 1].t_delta, tag + " t_delta not increasing");
      }
      const double ratio = rows.back().error / rows.front().error;
      out.require(ratio <= 0.2, tag + " error ratio " + fmt(ratio));
      out.detail += (out.detail.empty() ? "" : ", ") + tag + " ratio " + fmt(ratio);
    }
  }
  return out;
}

Outcome lemma5_check() {
  Outcome out;
  const double gamma = 0.25, p = gamma + 0.5, c = 1.5;
  const double c_gamma = std::pow(p, p) * std::pow(1.0 - p, 1.0 - p);
  double brute = 0.0;
  for (double s : log_grid(1e-6, 1e6, 1'000'000)) brute = std::max(brute, std::pow(s, p) / (s + 1.0));
  const double c_rel = std::abs(brute - c_gamma) / c_gamma;
  out.require(c_rel <= 1e-4, "c(gamma) rel gap " + fmt(c_rel));

  const auto problem = make_problem("source", 32, 0);
  const double v_norm = problem.source->v_norm;
  double prev = INFINITY;
  double worst_margin = INFINITY;
  for (double delta : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const auto noisy = perturb(problem, delta, 1);
    const double a = solve_a_delta(problem.fact, noisy.f_delta, delta);
    const double lhs = (c - 1.0) * delta / std::sqrt(a);
    const double rhs = c_gamma * v_norm * std::pow(a, gamma);
    worst_margin = std::min(worst_margin, rhs / lhs);
    out.require(lhs <= rhs, "inequality fails at delta " + fmt(delta));
    const double ratio = delta / std::sqrt(a);
    out.require(ratio < prev, "delta/sqrt(a) not decreasing at " + fmt(delta));
    prev = ratio;
  }
  if (out.passed) out.detail = "c(0.25) rel gap " + fmt(c_rel) + ", min rhs/lhs " + fmt(worst_margin);
  return out;
}

Outcome w_dot_check() {
  Outcome out;
  const Schedule s = Schedule::standard();
  double worst_ratio = 0.0, worst_fd = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix a = oracle::gaussian(6 + seed % 4, 6, 1000 + seed);
    const auto fact = factorize(DenseOperator(a));
    const Vector f = oracle::gaussian_vector(a.rows(), 1100 + seed);
    for (int k = 0; k < 20; ++k) {
      const double t = std::pow(10.0, -1.0 + 0.3 * k);
      const auto d = w_dot_diagnostic(s, fact, f, t);
      worst_ratio = std::max(worst_ratio, d.w_dot_norm / d.bound);
      const double h = 1e-4 * (1.0 + t);
      const Vector fd = (w_trajectory(s, fact, f, t + h) - w_trajectory(s, fact, f, t - h)) / (2 * h);
      const Vector an = w_dot(s, fact, f, t);
      worst_fd = std::max(worst_fd, (fd - an).norm() / an.norm());
    }
  }
  out.require(worst_ratio <= 1.0, "max ||w_dot||/bound " + fmt(worst_ratio));
  out.require(worst_fd <= 1e-4, "finite difference rel gap " + fmt(worst_fd));
  if (out.passed) out.detail = "max ||w_dot||/bound " + fmt(worst_ratio) + ", fd rel gap " + fmt(worst_fd);
  return out;
}

Outcome lemma6_check() {
  Outcome out;
  const double t = 30.0;
  const QuadratureOptions q{1e-12, 4'000'000};
  struct Forcing {
    const char* name;
    std::function<double(double)> fn;
    double limit;
  };
  const std::vector<Forcing> forcings{
      {"1", [](double) { return 1.0; }, 1.0},
      {"exp(-s)", [](double s) { return std::exp(-s); }, 0.0},
      {"1/(1+s)", [](double s) { return 1.0 / (1.0 + s); }, 0.0},
  };
  for (const auto& f : forcings) {
    const double value = exponential_convolution(f.fn, t, q).value;
    const double ref = oracle::trapezoid_convolution(f.fn, t, 1'000'000);
    const double gap = std::abs(value - f.limit);
    out.detail += (out.detail.empty() ? "" : ", ") + std::string(f.name) + " -> " + fmt(value) +
                  " (oracle " + fmt(ref) + ", gap to limit " + fmt(gap) + ")";
    if (gap > 1e-3) out.passed = false;
  }
  return out;
}

Outcome schedule_check() {
  Outcome out;
  for (double b : {0.25, 0.5, 0.75}) {
    const auto r = Schedule(1.0, 1.0, b).check_conditions(1e4, 200);
    out.require(r.rate_decreasing && r.rate_squared_decreasing, "b=" + fmt(b) + " not decreasing");
  }
  const Schedule s = Schedule::standard();
  const auto end = s.eval(1e4);
  const double r1 = std::abs(end.a_dot) / end.a;
  const double r2 = std::abs(end.a_dot) / (end.a * end.a);
  out.require(r1 < 1e-2 && r2 < 1e-2, "rates at 1e4: " + fmt(r1) + ", " + fmt(r2));
  const auto at99 = s.eval(99.0);
  const double closed = std::abs(at99.a_dot) / (at99.a * at99.a);
  const double ulp_gap = std::abs(closed - 0.05) / (std::numeric_limits<double>::epsilon() * 0.05);
  out.require(ulp_gap <= 4.0, "value at t=99 " + fmt(closed));
  if (out.passed) out.detail = "rates at 1e4 " + fmt(r1) + ", " + fmt(r2) + "; t=99 value within " + fmt(ulp_gap) + " ulp of 0.05";
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  Outcome (*run)();
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "residual identity", 5.0, residual_identity_check},
      {2, "psi structure", 5.0, psi_structure_check},
      {3, "operator bound", 0.0, operator_bound_check},
      {4, "root solver", 0.0, root_solver_check},
      {5, "integral rule", 0.0, integral_rule_check},
      {6, "integrator", 0.0, integrator_check},
      {7, "convergence trend", 60.0, convergence_check},
      {8, "source condition inequality", 0.0, lemma5_check},
      {9, "w_dot bound", 0.0, w_dot_check},
      {10, "convolution limits at t=30", 0.0, lemma6_check},
      {11, "schedule conditions", 0.0, schedule_check},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.passed = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      out.passed = false;
      out.detail += "; runtime over " + fmt(c.budget_s) + " s";
    }
    if (!out.passed) ++failures;
    std::printf("[%s] %2d %-30s %7.3fs  %s\n", out.passed ? "PASS" : "FAIL", c.id, c.name, secs, out.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
