#include "dsm/jacobi_svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "dsm/errors.hpp"

namespace dsm {
namespace {

// Rotation (c, s) that orthogonalizes columns p and q given their Gram
// entries alpha = |w_p|^2, beta = |w_q|^2 and gamma = w_p . w_q.
void jacobi_rotation(double alpha, double beta, double gamma, double& c, double& s) {
  const double zeta = (beta - alpha) / (2.0 * gamma);
  double t;
  if (std::abs(zeta) > 1e150) {
    t = 0.5 / zeta;
  } else {
    t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
  }
  c = 1.0 / std::sqrt(1.0 + t * t);
  s = c * t;
}

// Tall case: rows >= cols.
SvdResult tall_svd(const Matrix& a, int max_sweeps) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  Matrix w = a;
  Matrix v = Matrix::Identity(n, n);
  const double tol = static_cast<double>(m) * std::numeric_limits<double>::epsilon();

  bool converged = n < 2;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = w.col(p).squaredNorm();
        const double beta = w.col(q).squaredNorm();
        const double gamma = w.col(p).dot(w.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) {
          continue;
        }
        rotated = true;
        double c, s;
        jacobi_rotation(alpha, beta, gamma, c, s);
        for (Eigen::Index i = 0; i < m; ++i) {
          const double wp = w(i, p);
          const double wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    throw Error(ErrorKind::Accuracy, "one-sided Jacobi SVD did not converge");
  }

  Vector norms(n);
  for (Eigen::Index j = 0; j < n; ++j) norms(j) = w.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return norms(i) > norms(j); });

  SvdResult out;
  out.sigma.resize(n);
  out.v.resize(n, n);
  Matrix known(m, n);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.sigma(j) = norms(src);
    out.v.col(j) = v.col(src);
    if (norms(src) > 0.0) {
      known.col(k++) = w.col(src) / norms(src);
    }
  }

  // Orthonormal completion for zero singular values and the m - n tail.
  out.u.resize(m, m);
  out.u.leftCols(k) = known.leftCols(k);
  if (k < m) {
    Matrix complement;
    if (k == 0) {
      complement = Matrix::Identity(m, m);
    } else {
      Eigen::HouseholderQR<Matrix> qr(known.leftCols(k));
      complement = qr.householderQ() * Matrix::Identity(m, m);
    }
    out.u.rightCols(m - k) = complement.rightCols(m - k);
  }
  return out;
}

}  // namespace

SvdResult one_sided_jacobi_svd(const Matrix& a, int max_sweeps) {
  if (a.rows() >= a.cols()) {
    return tall_svd(a, max_sweeps);
  }
  SvdResult t = tall_svd(a.transpose(), max_sweeps);
  return SvdResult{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

}  // namespace dsm
