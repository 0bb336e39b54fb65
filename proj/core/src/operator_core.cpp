#include "dsm/operator_core.hpp"

#include <cmath>
#include <string>

#include "dsm/errors.hpp"
#include "dsm/jacobi_svd.hpp"

namespace dsm {
namespace {

void require_positive_shift(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw Error(ErrorKind::Domain, "regularization parameter must be positive and finite, got " +
                                       std::to_string(a));
  }
}

void require_size(const Vector& x, Eigen::Index n, const char* what) {
  if (x.size() != n) {
    throw Error(ErrorKind::Input, std::string(what) + ": expected length " + std::to_string(n) +
                                      ", got " + std::to_string(x.size()));
  }
}

}  // namespace

DenseOperator::DenseOperator(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.cols() < 1) {
    throw Error(ErrorKind::Input, "operator must have at least one row and one column");
  }
  if (!entries_.allFinite()) {
    throw Error(ErrorKind::Input, "operator has non-finite entries");
  }
}

Vector DenseOperator::apply(const Vector& x) const {
  require_size(x, cols(), "DenseOperator::apply");
  return entries_ * x;
}

Vector DenseOperator::apply_adjoint(const Vector& y) const {
  require_size(y, rows(), "DenseOperator::apply_adjoint");
  return entries_.transpose() * y;
}

SpectralFactorization::SpectralFactorization(Matrix left, Vector sigma, Matrix right,
                                             double rank_tolerance)
    : left_(std::move(left)),
      sigma_(std::move(sigma)),
      right_(std::move(right)),
      rank_tolerance_(rank_tolerance),
      rank_(0) {
  if (left_.rows() != left_.cols() || right_.rows() != right_.cols() ||
      sigma_.size() != std::min(left_.rows(), right_.rows())) {
    throw Error(ErrorKind::Input, "inconsistent singular system dimensions");
  }
  if (!(rank_tolerance_ >= 0.0)) {
    throw Error(ErrorKind::Input, "rank tolerance must be nonnegative");
  }
  for (Eigen::Index i = 0; i < sigma_.size(); ++i) {
    if (sigma_(i) < 0.0 || (i > 0 && sigma_(i) > sigma_(i - 1))) {
      throw Error(ErrorKind::Input, "singular values must be nonnegative and nonincreasing");
    }
    if (sigma_(i) > rank_tolerance_) ++rank_;
  }
}

double SpectralFactorization::spectral_bound() const noexcept {
  return sigma_.size() > 0 ? sigma_(0) * sigma_(0) : 0.0;
}

Vector SpectralFactorization::gram_eigenvalues() const {
  Vector s = Vector::Zero(rows());
  s.head(sigma_.size()) = sigma_.array().square().matrix();
  return s;
}

Vector SpectralFactorization::data_coefficients(const Vector& g) const {
  require_size(g, rows(), "data vector");
  return left_.transpose() * g;
}

Vector SpectralFactorization::solution_coefficients(const Vector& x) const {
  require_size(x, cols(), "solution vector");
  return right_.transpose() * x;
}

Matrix SpectralFactorization::reconstruct() const {
  const Eigen::Index p = sigma_.size();
  return left_.leftCols(p) * sigma_.asDiagonal() * right_.leftCols(p).transpose();
}

SpectralFactorization factorize(const DenseOperator& op, std::optional<double> rank_tolerance) {
  SvdResult svd = one_sided_jacobi_svd(op.matrix());
  double tol = 0.0;
  if (rank_tolerance) {
    if (!(*rank_tolerance >= 0.0) || !std::isfinite(*rank_tolerance)) {
      throw Error(ErrorKind::Input, "rank tolerance must be finite and nonnegative");
    }
    tol = *rank_tolerance;
  } else {
    tol = svd.sigma.size() > 0 ? 1e-12 * svd.sigma(0) : 0.0;
  }
  return SpectralFactorization(std::move(svd.u), std::move(svd.sigma), std::move(svd.v), tol);
}

Vector gram_shifted_inverse_apply(const SpectralFactorization& fact, double a, const Vector& g) {
  require_positive_shift(a);
  Vector coeff = fact.data_coefficients(g);
  const Vector s = fact.gram_eigenvalues();
  coeff.array() /= (s.array() + a);
  return fact.left_vectors() * coeff;
}

Vector regularized_solution(const SpectralFactorization& fact, double a, const Vector& f) {
  require_positive_shift(a);
  const Vector coeff = fact.data_coefficients(f);
  const Eigen::Index p = fact.spectral_size();
  const auto& sigma = fact.singular_values().array();
  const Vector filtered = (sigma * coeff.head(p).array() / (sigma.square() + a)).matrix();
  return fact.right_vectors().leftCols(p) * filtered;
}

Vector null_projection(const SpectralFactorization& fact, const Vector& f) {
  const Vector coeff = fact.data_coefficients(f);
  const Eigen::Index r = fact.rank();
  return fact.left_vectors().rightCols(fact.rows() - r) * coeff.tail(fact.rows() - r);
}

Vector kernel_projection(const SpectralFactorization& fact, const Vector& x) {
  const Vector coeff = fact.solution_coefficients(x);
  const Eigen::Index r = fact.rank();
  return fact.right_vectors().rightCols(fact.cols() - r) * coeff.tail(fact.cols() - r);
}

Vector minimal_norm_solution(const SpectralFactorization& fact, const Vector& f) {
  const Vector coeff = fact.data_coefficients(f);
  const Eigen::Index r = fact.rank();
  const Vector scaled = (coeff.head(r).array() / fact.singular_values().head(r).array()).matrix();
  return fact.right_vectors().leftCols(r) * scaled;
}

}  // namespace dsm
