#pragma once

#include "rsipm/types.hpp"

namespace rsipm {

// Thin SVD of a short-and-fat dense matrix M (rows <= cols):
//   M = U * diag(sigma) * Vt,  U: m x m orthonormal, Vt: m x cols with
// orthonormal rows, sigma nonincreasing and nonnegative.
struct ThinSvd {
  Mat U;
  Vec sigma;
  Mat Vt;
};

// Computes the thin SVD with a fixed sign convention (first nonzero entry of
// each left singular vector is nonnegative) so repeated runs are bit-identical.
ThinSvd thin_svd(const Mat& M);

// Extreme eigenvalues (lambda_min, lambda_max) of a symmetric matrix.
// Throws std::invalid_argument if B deviates from symmetry beyond 1e-8
// relative to its largest entry.
std::pair<double, double> sym_eig_extremes(const Mat& B);

}  // namespace rsipm
