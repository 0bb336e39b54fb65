#include "dsm/problems.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "dsm/errors.hpp"
#include "dsm/matrix_io.hpp"

namespace dsm {
namespace {

ProblemInstance assemble(Matrix a, Vector y, std::string label) {
  DenseOperator op(std::move(a));
  SpectralFactorization fact = factorize(op);
  Vector f = op.apply(y);
  return ProblemInstance{std::move(op), std::move(fact), std::move(f), std::move(y),
                         std::move(label), std::nullopt, {}};
}

std::string number(double x) { return io::format_double(x); }

}  // namespace

Matrix random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

ProblemInstance synthetic_problem(std::span<const double> sigmas, std::span<const double> y_coeffs,
                                  const Matrix& left, const Matrix& right, std::string label) {
  const Eigen::Index m = left.rows();
  const Eigen::Index n = right.rows();
  const auto k = static_cast<Eigen::Index>(sigmas.size());
  if (left.cols() != m || right.cols() != n || m < 1 || n < 1) {
    throw Error(ErrorKind::Input, "synthetic_problem: bases must be square and nonempty");
  }
  if (k > std::min(m, n)) {
    throw Error(ErrorKind::Input, "synthetic_problem: more singular values than min(m, n)");
  }
  if (y_coeffs.size() > sigmas.size()) {
    throw Error(ErrorKind::Input, "synthetic_problem: more solution coefficients than singular values");
  }
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > 0.0) || !std::isfinite(sigmas[i]) || (i > 0 && sigmas[i] > sigmas[i - 1])) {
      throw Error(ErrorKind::Input, "synthetic_problem: sigmas must be positive and nonincreasing");
    }
  }
  const Vector sigma = Eigen::Map<const Vector>(sigmas.data(), k);
  Matrix a = left.leftCols(k) * sigma.asDiagonal() * right.leftCols(k).transpose();
  Vector y = Vector::Zero(n);
  for (std::size_t i = 0; i < y_coeffs.size(); ++i) {
    y += y_coeffs[i] * right.col(static_cast<Eigen::Index>(i));
  }
  ProblemInstance p = assemble(std::move(a), std::move(y), label.empty() ? "synthetic" : label);
  p.metadata = {{"generator", "synthetic"},
                {"m", std::to_string(m)},
                {"n", std::to_string(n)},
                {"rank", std::to_string(k)}};
  return p;
}

ProblemInstance synthetic_problem(std::span<const double> sigmas, std::span<const double> y_coeffs,
                                  int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw Error(ErrorKind::Input, "synthetic_problem: m and n must be positive");
  std::mt19937_64 rng(seed);
  const Matrix left = random_orthogonal(m, rng);
  const Matrix right = random_orthogonal(n, rng);
  ProblemInstance p = synthetic_problem(sigmas, y_coeffs, left, right,
                                        "synthetic_" + std::to_string(m) + "x" + std::to_string(n));
  p.metadata.emplace_back("seed", std::to_string(seed));
  return p;
}

ProblemInstance fredholm_problem(FredholmKind kind, int n) {
  if (n < 8) throw Error(ErrorKind::Input, "fredholm_problem requires n >= 8");
  constexpr double kDepth = 0.25;
  constexpr double kKappa = 0.05;
  const double h = 1.0 / n;
  Matrix a(n, n);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * h;
    y(i) = std::sin(std::numbers::pi * x);
    for (int j = 0; j < n; ++j) {
      const double t = (j + 0.5) * h;
      const double d2 = (x - t) * (x - t);
      double k = 0.0;
      if (kind == FredholmKind::GravityLike) {
        k = kDepth / std::pow(kDepth * kDepth + d2, 1.5);
      } else {
        k = std::exp(-d2 / (4.0 * kKappa)) / std::sqrt(4.0 * std::numbers::pi * kKappa);
      }
      a(i, j) = h * k;
    }
  }
  DenseOperator op(std::move(a));
  SpectralFactorization fact = factorize(op);
  y -= kernel_projection(fact, y);
  Vector f = op.apply(y);
  const bool gravity = kind == FredholmKind::GravityLike;
  ProblemInstance p{std::move(op), std::move(fact), std::move(f), std::move(y),
                    std::string(gravity ? "gravity_like_" : "heat_like_") + std::to_string(n),
                    std::nullopt, {}};
  p.metadata = {{"generator", gravity ? "gravity_like" : "heat_like"},
                {"n", std::to_string(n)},
                {gravity ? "depth" : "kappa", number(gravity ? kDepth : kKappa)},
                {"solution", "sin(pi t)"}};
  return p;
}

NoisyObservation perturb(const ProblemInstance& p, double delta, std::uint64_t seed) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorKind::Domain, "perturb requires delta > 0");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector e(p.f.size());
  do {
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = normal(rng);
  } while (e.norm() == 0.0);
  e /= e.norm();
  return {p.f + delta * e, delta, seed};
}

ProblemInstance source_condition_problem(const ProblemInstance& base, double gamma,
                                         const Vector& v) {
  if (!(gamma > 0.0 && gamma < 0.5)) {
    throw Error(ErrorKind::Domain, "source condition exponent must lie in (0, 1/2)");
  }
  const SpectralFactorization& fact = base.fact;
  const Vector coeff = fact.solution_coefficients(v);
  const Eigen::Index r = fact.rank();
  Vector powered(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const double s = fact.singular_values()(i) * fact.singular_values()(i);
    powered(i) = std::pow(s, gamma) * coeff(i);
  }
  Vector y = fact.right_vectors().leftCols(r) * powered;
  ProblemInstance p = base;
  p.f = p.op.apply(y);
  p.y = std::move(y);
  p.label = base.label + "_source";
  p.source = SourceCondition{gamma, v.norm()};
  p.metadata.emplace_back("gamma", number(gamma));
  p.metadata.emplace_back("v_norm", number(v.norm()));
  return p;
}

void export_problem(const ProblemInstance& p, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::write_matrix_market(dir / "A.mtx", p.op.matrix(), p.label);
  io::write_csv(dir / "f.csv", p.f);
  if (p.y) io::write_csv(dir / "y.csv", *p.y);
  std::ofstream meta(dir / "metadata.txt");
  if (!meta) throw Error(ErrorKind::Input, "cannot write " + (dir / "metadata.txt").string());
  meta << "label = " << p.label << '\n';
  meta << "rows = " << p.op.rows() << '\n';
  meta << "cols = " << p.op.cols() << '\n';
  for (const auto& [key, value] : p.metadata) meta << key << " = " << value << '\n';
}

}  // namespace dsm
