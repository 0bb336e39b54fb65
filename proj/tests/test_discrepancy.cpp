#include <gtest/gtest.h>

#include <cmath>

#include "dsm/discrepancy.hpp"
#include "dsm/errors.hpp"
#include "oracles.hpp"

namespace dsm {
namespace {

SpectralFactorization scalar(double value) {
  return factorize(DenseOperator(Matrix::Constant(1, 1, value)));
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Input;
}

TEST(Psi, ScalarExample) {
  const auto v = psi(scalar(2.0), vec({1.0}), 4.0);
  EXPECT_DOUBLE_EQ(v.psi, 0.25);
  EXPECT_DOUBLE_EQ(v.discrepancy, 0.5);
}

TEST(Psi, PureNullData) {
  Matrix a(2, 2);
  a << 1, 0, 0, 0;
  const auto fact = factorize(DenseOperator(a));
  for (double alpha : {1e-10, 1e-3, 1.0, 1e5}) EXPECT_DOUBLE_EQ(psi(fact, vec({0.0, 1.0}), alpha).psi, 1.0);
}

TEST(Psi, DomainError) {
  EXPECT_EQ(kind_of([] { psi(scalar(1.0), vec({1.0}), 0.0); }), ErrorKind::Domain);
}

TEST(Psi, MatchesExplicitResolvent) {
  const Matrix a = oracle::gaussian(5, 4, 21);
  const Vector f = oracle::gaussian_vector(5, 22);
  const auto fact = factorize(DenseOperator(a));
  for (double alpha : {1e-4, 1e-1, 10.0}) {
    const Matrix qa = a * a.transpose() + alpha * Matrix::Identity(5, 5);
    const double direct = (alpha * qa.partialPivLu().solve(f)).squaredNorm();
    EXPECT_NEAR(psi(fact, f, alpha).psi, direct, 1e-10 * direct);
  }
}

TEST(Psi, PropertySweepMonotoneWithLimits) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix a = oracle::gaussian(6, 6, 100 + seed);
    const Vector f = oracle::gaussian_vector(6, 200 + seed);
    const auto fact = factorize(DenseOperator(a));
    const DataSpectrum spec(fact, f);
    const double s1 = spec.spectral_bound();
    double prev = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double alpha = s1 * std::pow(10.0, -12.0 + 18.0 * k / 999.0);
      const double p = spec.psi(alpha);
      EXPECT_GE(p, prev);
      prev = p;
    }
    // 1 - (a/(s+a))^2 <= 2 s/a, so the gap at a = 1e6 s1 is at most 2e-6.
    EXPECT_NEAR(spec.psi(1e6 * s1), f.squaredNorm(), 2e-6 * f.squaredNorm());
    EXPECT_NEAR(spec.norm_squared(), f.squaredNorm(), 1e-14 * f.squaredNorm());
  }
}

TEST(Psi, LowerLimitIsNullComponent) {
  const Matrix a = oracle::low_rank(6, 6, 3, 5);
  const Vector f = oracle::gaussian_vector(6, 6);
  const auto fact = factorize(DenseOperator(a));
  const DataSpectrum spec(fact, f);
  const double pf = null_projection(fact, f).squaredNorm();
  EXPECT_NEAR(spec.null_norm_squared(), pf, 1e-12);
  EXPECT_NEAR(spec.psi(1e-14 * spec.spectral_bound()), pf, 1e-10);
}

TEST(Psi, DerivativeMatchesDifferences) {
  const Matrix a = oracle::gaussian(4, 4, 9);
  const auto fact = factorize(DenseOperator(a));
  const DataSpectrum spec(fact, oracle::gaussian_vector(4, 10));
  for (double alpha : {1e-3, 0.1, 3.0}) {
    const double h = alpha * 1e-6;
    const double fd = (spec.psi(alpha + h) - spec.psi(alpha - h)) / (2 * h);
    EXPECT_NEAR(spec.psi_derivative(alpha), fd, 1e-6 * std::abs(fd));
  }
}

TEST(SolveADelta, ScalarClosedForm) {
  const double root = solve_a_delta(scalar(1.0), vec({1.0}), 0.1);
  EXPECT_NEAR(root, 3.0 / 17.0, 1e-12);
}

TEST(SolveADelta, NoiseDominates) {
  const double delta = 0.1;
  EXPECT_EQ(kind_of([&] { solve_a_delta(scalar(1.0), vec({0.075}), delta); }), ErrorKind::NoiseDominates);
}

TEST(SolveADelta, InconsistentData) {
  Matrix a(2, 2);
  a << 1, 0, 0, 0;
  EXPECT_EQ(kind_of([&] { solve_a_delta(factorize(DenseOperator(a)), vec({1.0, 0.2}), 0.1); }),
            ErrorKind::InconsistentData);
}

TEST(SolveADelta, RejectsBadConfig) {
  DiscrepancyConfig cfg;
  cfg.c = 2.5;
  EXPECT_THROW(solve_a_delta(scalar(1.0), vec({1.0}), 0.1, cfg), Error);
  EXPECT_THROW(solve_a_delta(scalar(1.0), vec({1.0}), -0.1), Error);
}

TEST(SolveADelta, MatchesGridScan) {
  const double delta = 1e-3;
  const double level = 1.5 * delta;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Matrix a = oracle::gaussian(8, 8, 300 + seed);
    Vector f = a * oracle::gaussian_vector(8, 400 + seed);
    f *= 0.1 / f.norm();
    const auto fact = factorize(DenseOperator(a));
    const double root = solve_a_delta(fact, f, delta);

    const Matrix& u = fact.left_vectors();
    const Vector coef = u.transpose() * f;
    const Vector sig = fact.singular_values();
    auto disc = [&](double alpha) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < coef.size(); ++i) {
        const double s = i < sig.size() ? sig(i) * sig(i) : 0.0;
        acc += std::pow(alpha / (s + alpha) * coef(i), 2);
      }
      return std::sqrt(acc);
    };
    const double lo = std::log(1e-14), hi = std::log(10.0);
    const long points = 1'000'000;
    const double step = (hi - lo) / (points - 1);
    double best = 0.0, best_gap = INFINITY;
    for (long k = 0; k < points; ++k) {
      const double alpha = std::exp(lo + step * k);
      const double gap = std::abs(disc(alpha) - level);
      if (gap < best_gap) {
        best_gap = gap;
        best = alpha;
      }
    }
    EXPECT_LE(std::abs(std::log(root) - std::log(best)), step) << seed;
    EXPECT_NEAR(disc(root), level, 1e-8 * level);
  }
}

TEST(HValue, ScalarExamples) {
  const Schedule s = Schedule::standard();
  EXPECT_NEAR(h_value(s, scalar(1.0), vec({1.0}), 99.0), 0.1 / 1.1, 1e-15);
  for (double t : {0.0, 1.0, 1e3}) EXPECT_EQ(h_value(s, scalar(1.0), vec({0.0}), t), 0.0);
}

TEST(HValue, NonincreasingAndRateVanishes) {
  const Matrix a = oracle::gaussian(6, 4, 77);
  const auto fact = factorize(DenseOperator(a));
  const Vector f = oracle::gaussian_vector(6, 78);
  const Schedule s = Schedule::standard();
  double prev = INFINITY;
  double prev_rate = INFINITY;
  for (double t = 1.0; t <= 1e8; t *= 2.0) {
    const double h = h_value(s, fact, f, t);
    EXPECT_LE(h, prev);
    prev = h;
    const double rate = std::abs(h_squared_rate(s, fact, f, t));
    if (t > 1e3) {
      EXPECT_LE(rate, prev_rate * (1 + 1e-12));
    }
    prev_rate = rate;
  }
  EXPECT_LT(prev_rate, 1e-6);
  EXPECT_NEAR(prev, null_projection(fact, f).norm(), 1e-3);
}

TEST(SettledCrossing, ConstantForcing) {
  const auto c = settled_crossing([](double) { return 1.0; }, 1.0, 0.5, 1e6,
                                  [](double) { return 0.05; });
  EXPECT_NEAR(c.time, std::log(2.0), 1e-10);
  EXPECT_NEAR(c.value, 0.5, 1e-12);
}

TEST(SettledCrossing, ConstantForcingClosedFormFamily) {
  for (double level : {0.01, 0.3, 0.9, 0.999}) {
    const double big_h = 2.0;
    const auto c = settled_crossing([&](double) { return big_h; }, big_h, level * big_h, 1e6,
                                    [](double) { return 0.1; });
    EXPECT_NEAR(c.time, -std::log1p(-level), 1e-9 * (1 - std::log1p(-level)));
  }
}

TEST(SettledCrossing, Errors) {
  auto step = [](double) { return 0.1; };
  EXPECT_EQ(kind_of([&] { settled_crossing([](double) { return 1.0; }, 1.0, 2.0, 1e3, step); }),
            ErrorKind::Configuration);
  EXPECT_EQ(kind_of([&] { settled_crossing([](double s) { return 1.0 / (1.0 + 1e-3 * s); }, 0.0, 0.01, 50.0, step); }),
            ErrorKind::HorizonExceeded);
}

TEST(IntegralStoppingTime, ScalarMatchesOracle) {
  const Schedule s = Schedule::standard();
  const auto fact = scalar(1.0);
  const Vector f = vec({1.0});
  const double delta = 0.05;
  const auto rec = integral_stopping_time(s, fact, f, delta, {}, 1e16);
  const auto h = [&](double t) { return h_value(s, fact, f, t); };
  const double ref = oracle::last_crossing(h, 1.5 * delta, 400.0, 1.0, 100'000);
  EXPECT_NEAR(rec.t_delta, ref, 1e-6 * ref);
  EXPECT_EQ(rec.rule, StoppingRule::Integral);
  EXPECT_NEAR(rec.a_delta, s(rec.t_delta), 1e-15);
  EXPECT_NEAR(rec.achieved_discrepancy, 1.5 * delta, 1e-8 * 1.5 * delta);
}

TEST(IntegralStoppingTime, Preconditions) {
  const Schedule s = Schedule::standard();
  EXPECT_EQ(kind_of([&] { integral_stopping_time(s, scalar(1.0), vec({0.05}), 0.05, {}, 1e16); }),
            ErrorKind::NoiseDominates);
  // h(0) = a(0)/(a(0)+s) below the level: a(0) too small relative to sigma_1^2.
  EXPECT_EQ(kind_of([&] { integral_stopping_time(Schedule(1e-3, 1, 0.5), scalar(1.0), vec({1.0}), 0.1, {}, 1e16); }),
            ErrorKind::Configuration);
}

TEST(IntegralStoppingTime, DeltaSweepTrend) {
  const Schedule s = Schedule::standard();
  Matrix a = oracle::gaussian(5, 5, 4);
  a /= Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
  const auto fact = factorize(DenseOperator(a));
  Vector f = a * oracle::gaussian_vector(5, 5);
  f /= f.norm();
  double prev_t = 0.0, prev_a = INFINITY, prev_root = INFINITY;
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto rec = integral_stopping_time(s, fact, f, delta, {}, 1e16);
    EXPECT_GT(rec.t_delta, prev_t);
    EXPECT_LT(rec.a_delta, prev_a);
    const double root = solve_a_delta(fact, f, delta);
    EXPECT_LT(root, prev_root);
    prev_t = rec.t_delta;
    prev_a = rec.a_delta;
    prev_root = root;
  }
}

TEST(ResidualIdentity, ScalarExample) {
  const auto r = residual_identity(scalar(2.0), vec({1.0}), 1.0);
  EXPECT_NEAR(r.lhs, 0.2, 1e-15);
  EXPECT_NEAR(r.rhs, 0.2, 1e-15);
}

TEST(ResidualIdentity, NullData) {
  Matrix a(2, 2);
  a << 1, 0, 0, 0;
  const DenseOperator op(a);
  const auto fact = factorize(op);
  for (double alpha : {1e-6, 1.0, 1e3}) {
    const auto r = residual_identity(op, fact, vec({0.0, 1.0}), alpha);
    EXPECT_NEAR(r.lhs, 1.0, 1e-15);
    EXPECT_NEAR(r.rhs, 1.0, 1e-15);
  }
}

TEST(ResidualIdentity, RandomDualPath) {
  const DenseOperator op(oracle::gaussian(10, 7, 31));
  const auto fact = factorize(op);
  const Vector f = oracle::gaussian_vector(10, 32);
  const auto r = residual_identity(op, fact, f, 1e-4);
  EXPECT_LE(std::abs(r.lhs - r.rhs), 1e-10 * f.norm());
  EXPECT_THROW(residual_identity(op, fact, f, 0.0), Error);
}

}  // namespace
}  // namespace dsm
