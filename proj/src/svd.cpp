#include "rsipm/svd.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace rsipm {

ThinSvd thin_svd(const Mat& M) {
  if (M.rows() > M.cols())
    throw std::invalid_argument("thin_svd: expected rows <= cols");
  if (!M.allFinite()) throw std::invalid_argument("thin_svd: non-finite input");

  Eigen::BDCSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSvd out;
  out.U = svd.matrixU();
  out.sigma = svd.singularValues();
  Mat V = svd.matrixV();  // cols x m

  // Fix signs so runs are reproducible: first nonzero entry of each left
  // singular vector is nonnegative.
  for (Eigen::Index j = 0; j < out.U.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.U.rows(); ++i) {
      const double u = out.U(i, j);
      if (u != 0.0) {
        if (u < 0.0) {
          out.U.col(j) = -out.U.col(j);
          V.col(j) = -V.col(j);
        }
        break;
      }
    }
  }
  out.Vt = V.transpose();
  return out;
}

std::pair<double, double> sym_eig_extremes(const Mat& B) {
  if (B.rows() != B.cols())
    throw std::invalid_argument("sym_eig_extremes: matrix not square");
  const double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
  const double asym = (B - B.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    throw std::invalid_argument("sym_eig_extremes: input not symmetric");

  Eigen::SelfAdjointEigenSolver<Mat> es(B, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sym_eig_extremes: eigensolver failed");
  const Vec& ev = es.eigenvalues();  // ascending
  return {ev(0), ev(ev.size() - 1)};
}

}  // namespace rsipm
