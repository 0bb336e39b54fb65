#pragma once

#include "dsm/linalg.hpp"

namespace dsm {

/// Full singular value decomposition A = U * diag(sigma) * V^T with U (m x m)
/// and V (n x n) orthogonal and sigma (min(m, n)) sorted nonincreasing.
struct SvdResult {
  Matrix u;
  Vector sigma;
  Matrix v;
};

/// One-sided (Hestenes) Jacobi SVD. Columns of the working matrix are
/// rotated pairwise until every pair is orthogonal to within
/// rows * epsilon relative to the product of their norms; the left vectors
/// of zero singular values are completed to an orthonormal basis with a
/// Householder QR step.
///
/// Throws dsm::Error(Accuracy) if the sweeps do not converge.
SvdResult one_sided_jacobi_svd(const Matrix& a, int max_sweeps = 100);

}  // namespace dsm
