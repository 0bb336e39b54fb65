#include "dsm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "dsm/dsm_solver.hpp"
#include "dsm/errors.hpp"
#include "dsm/matrix_io.hpp"
#include "dsm/quadrature.hpp"
#include "dsm/schedule.hpp"

namespace dsm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  return io::format_double(x);
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double step = std::log(hi / lo) / (count - 1);
  for (int k = 0; k < count; ++k) grid[static_cast<std::size_t>(k)] = lo * std::exp(step * k);
  grid.back() = hi;
  return grid;
}

std::vector<double> harmonic(int n, double power) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = 1.0 / std::pow(i + 1.0, power);
  return v;
}

// Seeded problem family for the verification suites: Gaussian operators
// on even seeds, graded-spectrum synthetic operators on odd seeds.
struct RandomCase {
  ProblemInstance problem;
  NoisyObservation noisy;
};

RandomCase random_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919 + 17);
  std::uniform_int_distribution<int> dim(2, 64);
  const int m = dim(rng);
  const int n = dim(rng);
  if (seed % 2 == 0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a(m, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < m; ++i) a(i, j) = normal(rng) / std::sqrt(double(m));
    Vector y0(n);
    for (Eigen::Index i = 0; i < n; ++i) y0(i) = normal(rng);
    DenseOperator op(std::move(a));
    SpectralFactorization fact = factorize(op);
    Vector y = minimal_norm_solution(fact, op.apply(y0));
    Vector f = op.apply(y);
    ProblemInstance p{std::move(op), std::move(fact), std::move(f), std::move(y),
                      "gaussian_" + std::to_string(seed), std::nullopt, {}};
    NoisyObservation noisy = perturb(p, 1e-2 * p.f.norm(), seed + 1);
    return {std::move(p), std::move(noisy)};
  }
  const int k = std::min(m, n);
  std::vector<double> sigmas(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    sigmas[static_cast<std::size_t>(i)] = k == 1 ? 1.0 : std::pow(10.0, -8.0 * i / (k - 1));
  }
  ProblemInstance p = synthetic_problem(sigmas, harmonic(k, 1.0), m, n, seed);
  NoisyObservation noisy = perturb(p, 1e-3 * p.f.norm(), seed + 1);
  return {std::move(p), std::move(noisy)};
}

class Checker {
 public:
  explicit Checker(std::vector<CheckResult>& out, std::string suite)
      : out_(out), suite_(std::move(suite)) {}

  // Records measured <= threshold.
  void at_most(const std::string& name, double measured, double threshold) {
    out_.push_back({suite_, name, measured <= threshold, measured, threshold});
  }
  // Records a boolean property; measured counts violations.
  void holds(const std::string& name, int violations) {
    out_.push_back({suite_, name, violations == 0, double(violations), 0.0});
  }

 private:
  std::vector<CheckResult>& out_;
  std::string suite_;
};

void verify_identities(std::vector<CheckResult>& out, std::uint64_t seed) {
  Checker check(out, "identities");
  double worst_residual = 0.0, worst_commute = 0.0, worst_recon = 0.0, worst_orth = 0.0;
  const auto grid = log_grid(1e-8, 1.0, 10);
  for (std::uint64_t k = 0; k < 20; ++k) {
    const RandomCase rc = random_case(seed + k);
    const auto& fact = rc.problem.fact;
    const auto& f = rc.noisy.f_delta;
    const Matrix& a_mat = rc.problem.op.matrix();
    const double fnorm = f.norm();
    for (double a : grid) {
      const ResidualIdentity r = residual_identity(rc.problem.op, fact, f, a);
      worst_residual = std::max(worst_residual, std::abs(r.lhs - r.rhs) / fnorm);
      const Vector left = a_mat * regularized_solution(fact, a, f);
      // Q Q_a^{-1} f in the eigenbasis of Q.
      const Vector s = fact.gram_eigenvalues();
      const Vector coeff = fact.data_coefficients(f);
      const Vector right =
          fact.left_vectors() * (s.array() * coeff.array() / (s.array() + a)).matrix();
      worst_commute = std::max(worst_commute, (left - right).norm() / std::max(left.norm(), 1e-300));
    }
    const double scale = std::max(1.0, a_mat.norm());
    worst_recon = std::max(worst_recon, (fact.reconstruct() - a_mat).norm() / scale);
    const auto& u = fact.left_vectors();
    const auto& v = fact.right_vectors();
    worst_orth = std::max({worst_orth,
                           (u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff(),
                           (v.transpose() * v - Matrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff()});
  }
  check.at_most("residual_identity_rel", worst_residual, 1e-10);
  check.at_most("commutation_rel", worst_commute, 1e-12);
  check.at_most("factorization_reconstruction", worst_recon, 1e-12);
  check.at_most("factorization_orthogonality", worst_orth, 1e-12);
}

void verify_bounds(std::vector<CheckResult>& out, std::uint64_t seed) {
  Checker check(out, "bounds");
  const auto grid = log_grid(1e-8, 1.0, 41);
  double worst_w = 0.0, worst_q = 0.0, worst_null = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const RandomCase rc = random_case(seed + k);
    const auto& fact = rc.problem.fact;
    const auto& f = rc.noisy.f_delta;
    for (double a : grid) {
      worst_w = std::max(worst_w, regularized_solution(fact, a, f).norm() * 2.0 * std::sqrt(a) / f.norm());
      worst_q = std::max(worst_q, gram_shifted_inverse_apply(fact, a, f).norm() * a / f.norm());
    }
    worst_null = std::max(worst_null, null_projection(fact, f).norm() / rc.noisy.delta);
  }
  check.at_most("regularized_solution_bound", worst_w, 1.0 + 1e-12);
  check.at_most("gram_shifted_inverse_bound", worst_q, 1.0 + 1e-12);
  check.at_most("null_component_le_delta", worst_null, 1.0 + 1e-12);

  // Noise propagation through the DSM flow.
  const Schedule sched = Schedule::standard();
  double worst_j2 = 0.0;
  for (std::uint64_t k = 0; k < 4; ++k) {
    const RandomCase rc = random_case(seed + k);
    const Vector noise = rc.noisy.f_delta - rc.problem.f;
    for (double t : {1.0, 10.0, 100.0, 1000.0}) {
      const Vector j2 = integrate_u(sched, rc.problem.fact, noise, {}, t);
      const double bound = (1.0 - std::exp(-t)) * noise.norm() / (2.0 * std::sqrt(sched(t)));
      worst_j2 = std::max(worst_j2, j2.norm() / bound);
    }
  }
  check.at_most("noise_propagation_bound", worst_j2, 1.0 + 1e-9);

  // Derivative bound on w(t).
  double worst_wdot = 0.0;
  double worst_fd = 0.0;
  const auto times = log_grid(0.1, 1e4, 20);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const RandomCase rc = random_case(seed + k);
    for (double t : times) {
      const WDotDiagnostic d = w_dot_diagnostic(sched, rc.problem.fact, rc.noisy.f_delta, t);
      if (d.bound > 0.0) worst_wdot = std::max(worst_wdot, d.w_dot_norm / d.bound);
      const double h = 1e-4 * t;
      const Vector fd = (w_trajectory(sched, rc.problem.fact, rc.noisy.f_delta, t + h) -
                         w_trajectory(sched, rc.problem.fact, rc.noisy.f_delta, t - h)) /
                        (2.0 * h);
      const Vector exact = w_dot(sched, rc.problem.fact, rc.noisy.f_delta, t);
      if (exact.norm() > 0.0) worst_fd = std::max(worst_fd, (fd - exact).norm() / exact.norm());
    }
  }
  check.at_most("w_dot_bound", worst_wdot, 1.0 + 1e-12);
  check.at_most("w_dot_finite_difference_rel", worst_fd, 1e-4);
}

void verify_lemmas(std::vector<CheckResult>& out, std::uint64_t seed) {
  Checker check(out, "lemmas");
  const Schedule sched = Schedule::standard();

  // psi monotone with the limits psi(0+) = ||P f||^2, psi(inf) = ||f||^2.
  int psi_violations = 0;
  double worst_limit = 0.0;
  for (std::uint64_t k = 0; k < 5; ++k) {
    const RandomCase rc = random_case(seed + k);
    const DataSpectrum spec(rc.problem.fact, rc.noisy.f_delta);
    const double top = spec.spectral_bound();
    double prev = 0.0;
    for (double a : log_grid(1e-12 * top, 1e6 * top, 1000)) {
      const double p = spec.psi(a);
      if (p < prev) ++psi_violations;
      prev = p;
    }
    worst_limit = std::max(worst_limit, std::abs(prev - spec.norm_squared()) / spec.norm_squared());
  }
  check.holds("psi_nondecreasing", psi_violations);
  check.at_most("psi_upper_limit_rel", worst_limit, 1e-5);

  // h diagnostics on data with a nonzero N(A*) component.
  {
    std::mt19937_64 rng(seed + 101);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a(12, 8);
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = normal(rng) / std::sqrt(12.0);
    Vector f(12);
    for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = normal(rng);
    const SpectralFactorization fact = factorize(DenseOperator(a));
    int rate_violations = 0;
    double last_rate = 0.0;
    for (double t : log_grid(1.0, 1e6, 100)) {
      const double rate = std::abs(h_squared_rate(sched, fact, f, t));
      const auto [at, a_dot] = sched.eval(t);
      if (rate > 2.0 * std::abs(a_dot) / at * (1.0 + 1e-12)) ++rate_violations;
      last_rate = rate;
    }
    check.holds("h_squared_rate_bound", rate_violations);
    check.at_most("h_squared_rate_tail", last_rate, 1e-3);

    const DataSpectrum spec(fact, f);
    const auto h = [&](double s) { return spec.discrepancy(sched(s)); };
    const double horizon = 1e4;
    const double g = exponential_convolution(h, horizon, {1e-12, 4'000'000}).value;
    check.at_most("convolution_ratio_to_h", std::abs(g / h(horizon) - 1.0), 0.1);
  }

  // Rate under a source condition.
  {
    const double gamma = 0.25;
    const double p = gamma + 0.5;
    const double c_gamma = std::pow(p, p) * std::pow(1.0 - p, 1.0 - p);
    double worst_max = 0.0;
    for (double a : {1e-6, 1e-3, 1.0}) {
      double best = 0.0;
      for (double s : log_grid(a * 1e-6, a * 1e6, 1'000'000)) {
        best = std::max(best, std::pow(s, p) / (s + a));
      }
      const double formula = c_gamma * std::pow(a, gamma - 0.5);
      worst_max = std::max(worst_max, std::abs(best - formula) / formula);
    }
    check.at_most("source_constant_max_rel", worst_max, 1e-4);

    const ProblemInstance src = make_problem("source", 32, seed);
    const DiscrepancyConfig cfg;
    int inequality_violations = 0, trend_violations = 0;
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (double delta : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
      const NoisyObservation noisy = perturb(src, delta, seed + 5);
      const double a_delta = solve_a_delta(src.fact, noisy.f_delta, delta, cfg);
      const double ratio = delta / std::sqrt(a_delta);
      const double rhs = c_gamma * src.source->v_norm * std::pow(a_delta, gamma);
      if ((cfg.c - 1.0) * ratio > rhs) ++inequality_violations;
      if (!(ratio < prev_ratio)) ++trend_violations;
      prev_ratio = ratio;
    }
    check.holds("source_rate_inequality", inequality_violations);
    check.holds("delta_over_sqrt_a_decreasing", trend_violations);
  }

  // Limits of the exponential convolution.
  {
    const QuadratureOptions quad{1e-12, 4'000'000};
    // 1/(1+s) approaches its limit only like 1/t.
    const double t = 1e4;
    const double one = exponential_convolution([](double) { return 1.0; }, t, quad).value;
    const double decay = exponential_convolution([](double s) { return std::exp(-s); }, t, quad).value;
    const double harm = exponential_convolution([](double s) { return 1.0 / (1.0 + s); }, t, quad).value;
    check.at_most("convolution_limit_constant", std::abs(one - 1.0), 1e-3);
    check.at_most("convolution_limit_exponential", std::abs(decay), 1e-3);
    check.at_most("convolution_limit_harmonic", std::abs(harm), 1e-3);
  }

  // a^2 ||T_a^{-1} y||^2 -> 0 for y orthogonal to N(A).
  {
    const ProblemInstance p = make_problem("synthetic", 32, seed);
    const Vector& y = *p.y;
    const Vector coeff = p.fact.solution_coefficients(y);
    int violations = 0;
    double prev = std::numeric_limits<double>::infinity();
    double last = 0.0;
    for (int k = 0; k <= 14; ++k) {
      const double a = std::pow(10.0, -k);
      double sum = 0.0;
      for (Eigen::Index i = 0; i < coeff.size(); ++i) {
        const double s = i < p.fact.spectral_size()
                             ? p.fact.singular_values()(i) * p.fact.singular_values()(i)
                             : 0.0;
        const double filter = a / (s + a);
        sum += filter * filter * coeff(i) * coeff(i);
      }
      if (!(sum < prev)) ++violations;
      prev = sum;
      last = sum;
    }
    check.holds("tikhonov_bias_decreasing", violations);
    check.at_most("tikhonov_bias_tail_rel", last / y.squaredNorm(), 1e-6);
  }

  // Schedule decay conditions.
  for (double b : {0.25, 0.5, 0.75}) {
    const Schedule s(1.0, 1.0, b);
    const ScheduleConditionReport r = s.check_conditions(1e4, 200);
    const std::string tag = "schedule_b" + std::to_string(b).substr(0, 4);
    check.holds(tag + "_rate_decreasing", r.rate_decreasing ? 0 : 1);
    check.holds(tag + "_rate_squared_decreasing", r.rate_squared_decreasing ? 0 : 1);
  }
}

}  // namespace

RuleSelection parse_rule(std::string_view text) {
  if (text == "integral") return RuleSelection::Integral;
  if (text == "root") return RuleSelection::Root;
  if (text == "both") return RuleSelection::Both;
  throw Error(ErrorKind::Input, "unknown rule '" + std::string(text) + "' (integral|root|both)");
}

ProblemInstance make_problem(std::string_view name, int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::Input, "problem size must be positive");
  if (name == "synthetic" || name == "source") {
    const auto sigmas = harmonic(n, 2.0);
    ProblemInstance p = synthetic_problem(sigmas, harmonic(n, 1.0), n, n, seed);
    if (name == "synthetic") return p;
    const Vector v = p.fact.right_vectors() * Eigen::Map<const Vector>(harmonic(n, 1.0).data(), n);
    return source_condition_problem(p, 0.25, v);
  }
  if (name == "gravity") return fredholm_problem(FredholmKind::GravityLike, n);
  if (name == "heat") return fredholm_problem(FredholmKind::HeatLike, n);
  throw Error(ErrorKind::Input,
              "unknown problem '" + std::string(name) + "' (synthetic|source|gravity|heat)");
}

void SweepConfig::validate() const {
  if (deltas.empty()) throw Error(ErrorKind::Input, "sweep requires at least one delta");
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!(deltas[k] > 0.0)) throw Error(ErrorKind::Input, "deltas must be positive");
    if (k > 0 && !(deltas[k] < deltas[k - 1])) {
      throw Error(ErrorKind::Input, "deltas must be strictly decreasing");
    }
  }
  if (!(c > 1.0 && c < 2.0)) throw Error(ErrorKind::Input, "c must lie in (1, 2)");
  if (!(quad_tolerance > 0.0)) throw Error(ErrorKind::Input, "quadrature tolerance must be positive");
  if (!(t_max > 0.0)) throw Error(ErrorKind::Input, "t_max must be positive");
  (void)Schedule::parse(schedule);
}

bool SweepReport::any_precondition_failure() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const SweepRow& r) { return r.precondition_failure; });
}

void SweepReport::write_csv(std::ostream& out) const {
  out << "delta,rule,a_delta,t_delta,error,residual,delta_over_sqrt_a,wall_time_ms,status\n";
  for (const SweepRow& r : rows) {
    out << csv_number(r.delta) << ',' << to_string(r.rule) << ',' << csv_number(r.a_delta) << ','
        << csv_number(r.t_delta) << ',' << csv_number(r.error) << ',' << csv_number(r.residual)
        << ',' << csv_number(r.delta_over_sqrt_a) << ',' << csv_number(r.wall_time_ms) << ','
        << r.status << '\n';
  }
}

std::string SweepReport::to_csv() const {
  std::ostringstream out;
  write_csv(out);
  return out.str();
}

SweepReport run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const ProblemInstance problem = make_problem(cfg.problem, cfg.n, cfg.seed);
  const Schedule schedule = Schedule::parse(cfg.schedule);
  DiscrepancyConfig dcfg;
  dcfg.c = cfg.c;
  IntegratorConfig icfg;
  icfg.quad_tolerance = cfg.quad_tolerance;

  std::vector<StoppingRule> rules;
  if (cfg.rule != RuleSelection::Root) rules.push_back(StoppingRule::Integral);
  if (cfg.rule != RuleSelection::Integral) rules.push_back(StoppingRule::Root);

  SweepReport report;
  for (double delta : cfg.deltas) {
    const NoisyObservation noisy = perturb(problem, delta, cfg.seed + 1);
    for (StoppingRule rule : rules) {
      SweepRow row;
      row.delta = delta;
      row.rule = rule;
      const auto start = std::chrono::steady_clock::now();
      try {
        const DsmResult r = rule == StoppingRule::Integral
                                ? solve_theorem1(problem, noisy, schedule, dcfg, icfg, cfg.t_max)
                                : solve_theorem2(problem, noisy, schedule, dcfg, icfg);
        row.a_delta = r.stopping.a_delta;
        row.t_delta = r.stopping.t_delta;
        row.error = r.error_to_y.value_or(kNaN);
        row.residual = r.residual_norm;
        row.delta_over_sqrt_a = r.delta_over_sqrt_a;
      } catch (const Error& e) {
        row.a_delta = row.t_delta = row.error = row.residual = row.delta_over_sqrt_a = kNaN;
        row.status = std::string(to_string(e.kind()));
        row.precondition_failure = e.is_precondition();
      }
      const auto stop = std::chrono::steady_clock::now();
      row.wall_time_ms =
          cfg.record_timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

VerifySuite parse_suite(std::string_view text) {
  if (text == "identities") return VerifySuite::Identities;
  if (text == "bounds") return VerifySuite::Bounds;
  if (text == "lemmas") return VerifySuite::Lemmas;
  if (text == "all") return VerifySuite::All;
  throw Error(ErrorKind::Input,
              "unknown suite '" + std::string(text) + "' (identities|bounds|lemmas|all)");
}

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

void VerifyReport::write_csv(std::ostream& out) const {
  out << "suite,check,status,measured,threshold\n";
  for (const CheckResult& c : checks) {
    out << c.suite << ',' << c.name << ',' << (c.passed ? "pass" : "FAIL") << ','
        << csv_number(c.measured) << ',' << csv_number(c.threshold) << '\n';
  }
}

VerifyReport run_verify(VerifySuite suite, std::uint64_t seed) {
  VerifyReport report;
  if (suite == VerifySuite::Identities || suite == VerifySuite::All) verify_identities(report.checks, seed);
  if (suite == VerifySuite::Bounds || suite == VerifySuite::All) verify_bounds(report.checks, seed);
  if (suite == VerifySuite::Lemmas || suite == VerifySuite::All) verify_lemmas(report.checks, seed);
  return report;
}

}  // namespace dsm
