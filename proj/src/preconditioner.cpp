#include "rsipm/preconditioner.hpp"

#include <cmath>
#include <stdexcept>

#include "rsipm/svd.hpp"

namespace rsipm {

Preconditioner build_preconditioner(const SpMat& A, const Vec& d,
                                    const SketchMatrix& W) {
  if (W.w < A.rows())
    throw std::invalid_argument("build_preconditioner: sketch width below m");
  if ((d.array() <= 0.0).any())
    throw std::invalid_argument("build_preconditioner: d must be positive");

  const Mat ADW = apply_sketch_right(A, d, W);
  ThinSvd svd = thin_svd(ADW);
  const double smax = svd.sigma(0);
  const double smin = svd.sigma(svd.sigma.size() - 1);
  if (smax <= 0.0 || smin <= 1e-12 * smax)
    throw RankDeficientError(
        "build_preconditioner: ADW numerically rank deficient (sketch failed "
        "to preserve the row space of AD)");

  Preconditioner P;
  P.U = std::move(svd.U);
  P.sigma_half = std::move(svd.sigma);
  P.V_hat = svd.Vt.transpose();
  return P;
}

Vec apply_Q_inv_half(const Preconditioner& P, const Vec& r) {
  return P.U * (P.U.transpose() * r).cwiseQuotient(P.sigma_half);
}

Vec apply_precond_normal_op(const Preconditioner& P, const SpMat& A,
                            const Vec& d, const Vec& z) {
  const Vec t = apply_Q_inv_half(P, z);
  const Vec u = d.array().square() * (A.transpose() * t).array();
  return apply_Q_inv_half(P, A * u);
}

Vec apply_ADW_pinv(const Preconditioner& P, const Vec& r) {
  return P.V_hat * (P.U.transpose() * r).cwiseQuotient(P.sigma_half);
}

double precond_condition_number(const Preconditioner& P, const SpMat& A,
                                const Vec& d) {
  const auto m = A.rows();
  Mat M(m, m);
  Vec e = Vec::Zero(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    e(j) = 1.0;
    M.col(j) = apply_precond_normal_op(P, A, d, e);
    e(j) = 0.0;
  }
  M = 0.5 * (M + M.transpose()).eval();  // symmetrize rounding noise
  const auto [lo, hi] = sym_eig_extremes(M);
  if (lo <= 0.0)
    throw std::runtime_error(
        "precond_condition_number: preconditioned operator not positive "
        "definite");
  return std::sqrt(hi / lo);
}

}  // namespace rsipm
