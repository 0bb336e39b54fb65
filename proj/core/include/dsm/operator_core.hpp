#pragma once

#include <optional>

#include "dsm/linalg.hpp"

namespace dsm {

/// Real dense realization of a bounded linear operator A : R^n -> R^m.
/// The adjoint A* is the transpose.
class DenseOperator {
 public:
  /// Throws dsm::Error(Input) on empty or non-finite entries.
  explicit DenseOperator(Matrix entries);

  const Matrix& matrix() const noexcept { return entries_; }
  Eigen::Index rows() const noexcept { return entries_.rows(); }
  Eigen::Index cols() const noexcept { return entries_.cols(); }

  Vector apply(const Vector& x) const;
  Vector apply_adjoint(const Vector& y) const;

 private:
  Matrix entries_;
};

/// Singular system of A. The eigenpairs of T = A*A are (sigma_i^2, v_i) and
/// those of Q = AA* are (sigma_i^2, u_i), with eigenvalue 0 for the left
/// vectors beyond min(m, n). Immutable after construction.
class SpectralFactorization {
 public:
  SpectralFactorization(Matrix left, Vector sigma, Matrix right, double rank_tolerance);

  const Matrix& left_vectors() const noexcept { return left_; }
  const Vector& singular_values() const noexcept { return sigma_; }
  const Matrix& right_vectors() const noexcept { return right_; }
  double rank_tolerance() const noexcept { return rank_tolerance_; }

  Eigen::Index rows() const noexcept { return left_.rows(); }
  Eigen::Index cols() const noexcept { return right_.rows(); }
  /// min(m, n)
  Eigen::Index spectral_size() const noexcept { return sigma_.size(); }
  /// Number of singular values above the rank tolerance.
  Eigen::Index rank() const noexcept { return rank_; }
  /// ||Q|| = ||T|| = sigma_1^2.
  double spectral_bound() const noexcept;

  /// Eigenvalues of Q associated with each left vector (length m).
  Vector gram_eigenvalues() const;

  /// U^T g
  Vector data_coefficients(const Vector& g) const;
  /// V^T x
  Vector solution_coefficients(const Vector& x) const;

  /// Reassembles U Sigma V^T.
  Matrix reconstruct() const;

 private:
  Matrix left_;
  Vector sigma_;
  Matrix right_;
  double rank_tolerance_;
  Eigen::Index rank_;
};

/// Computes the singular system with the one-sided Jacobi method. The
/// default rank tolerance is 1e-12 * sigma_1; singular values at or below
/// it are treated as exact zeros by the projectors.
SpectralFactorization factorize(const DenseOperator& op,
                                std::optional<double> rank_tolerance = std::nullopt);

/// Q_a^{-1} g = sum_i (u_i^T g) / (sigma_i^2 + a) u_i. Throws Domain on a <= 0.
Vector gram_shifted_inverse_apply(const SpectralFactorization& fact, double a, const Vector& g);

/// T_a^{-1} A^* f = sum_i sigma_i (u_i^T f) / (sigma_i^2 + a) v_i. Throws Domain on a <= 0.
Vector regularized_solution(const SpectralFactorization& fact, double a, const Vector& f);

/// Orthogonal projection onto N(A*) = N(Q).
Vector null_projection(const SpectralFactorization& fact, const Vector& f);

/// Orthogonal projection onto N(A) = N(T).
Vector kernel_projection(const SpectralFactorization& fact, const Vector& x);

/// Pseudoinverse applied to f: the minimal-norm least-squares solution.
Vector minimal_norm_solution(const SpectralFactorization& fact, const Vector& f);

}  // namespace dsm
