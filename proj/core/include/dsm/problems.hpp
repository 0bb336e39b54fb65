#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dsm/linalg.hpp"
#include "dsm/operator_core.hpp"

namespace dsm {

/// Parameters of a source-condition instance y = T^gamma v.
struct SourceCondition {
  double gamma;
  double v_norm;
};

/// A consistent test problem A y = f with y orthogonal to N(A).
struct ProblemInstance {
  DenseOperator op;
  SpectralFactorization fact;
  Vector f;
  /// Minimal-norm solution, when known.
  std::optional<Vector> y;
  std::string label;
  std::optional<SourceCondition> source;
  /// Free-form key/value pairs written by export_problem.
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Noisy data with ||f_delta - f|| = delta.
struct NoisyObservation {
  Vector f_delta;
  double delta;
  std::uint64_t seed;
};

/// Haar-like random orthogonal matrix (QR of a Gaussian matrix with the
/// sign of diag(R) fixed).
Matrix random_orthogonal(Eigen::Index n, std::mt19937_64& rng);

/// A = U diag(sigmas) V^T with the given orthogonal bases, y = sum_i
/// y_coeffs_i v_i, f = A y. Throws Input on dimension mismatch, non-positive
/// or increasing sigmas, or more y coefficients than sigmas.
ProblemInstance synthetic_problem(std::span<const double> sigmas, std::span<const double> y_coeffs,
                                  const Matrix& left, const Matrix& right, std::string label = {});

/// Same with U and V drawn from `seed`.
ProblemInstance synthetic_problem(std::span<const double> sigmas, std::span<const double> y_coeffs,
                                  int m, int n, std::uint64_t seed);

enum class FredholmKind { GravityLike, HeatLike };

/// Midpoint-rule discretization on [0, 1]^2 of a first-kind Fredholm
/// operator with smooth solution y(t) = sin(pi t):
///   gravity_like: k(x, t) = d / (d^2 + (x - t)^2)^{3/2}, d = 0.25
///   heat_like:    k(x, t) = exp(-(x - t)^2 / (4 kappa)) / sqrt(4 pi kappa), kappa = 0.05
/// y is projected onto R(A^T) before forming f = A y. Throws Input for n < 8.
ProblemInstance fredholm_problem(FredholmKind kind, int n);

/// f_delta = f + delta * e with e a seeded random unit vector.
/// Throws Domain unless delta > 0.
NoisyObservation perturb(const ProblemInstance& p, double delta, std::uint64_t seed);

/// Replaces y by T^gamma v (components in N(A) dropped) and f by A y.
/// Throws Domain unless 0 < gamma < 1/2.
ProblemInstance source_condition_problem(const ProblemInstance& base, double gamma,
                                         const Vector& v);

/// Writes A.mtx, f.csv, y.csv (when known) and metadata.txt into `dir`,
/// creating it if needed.
void export_problem(const ProblemInstance& p, const std::filesystem::path& dir);

}  // namespace dsm
