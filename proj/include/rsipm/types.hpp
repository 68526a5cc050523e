#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace rsipm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
// Row-compressed storage: every product the solver needs is A*x or A^T*y with
// A short-and-fat, so one format covers all kernels.
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Thrown when the sketched matrix ADW loses rank, i.e. the sketch failed to
// preserve the row space of AD.
struct RankDeficientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when the correction identity A S^{-1} v = AD^2A^T dy - p fails its
// tolerance; signals numerical breakdown of the direction construction.
struct CorrectionIdentityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file (LP JSON or libsvm text); message names the offending
// field or line.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rsipm
