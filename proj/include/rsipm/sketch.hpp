#pragma once

#include <cstdint>
#include <vector>

#include "rsipm/types.hpp"

namespace rsipm {

enum class SketchKind { SparseEmbedding, Gaussian };

struct SketchSpec {
  SketchKind kind = SketchKind::SparseEmbedding;
  int w = 0;        // embedding dimension (columns of W)
  int s = 8;        // nonzeros per row, sparse kind only
  std::uint64_t seed = 0;
};

// Realized n x w random embedding. The sparse kind is OSNAP-style: exactly s
// entries per row, distinct columns, values +-1/sqrt(s). The gaussian kind is
// dense i.i.d. N(0, 1/w).
struct SketchMatrix {
  SketchKind kind = SketchKind::SparseEmbedding;
  int n = 0;
  int w = 0;
  int s = 0;
  // sparse kind: row i occupies [i*s, (i+1)*s) in cols/vals
  std::vector<std::int32_t> cols;
  std::vector<double> vals;
  // gaussian kind
  Mat dense;
};

// Default embedding dimension used when the caller does not override: large
// enough that the preconditioned condition number stays below the kappa^2
// bound for zeta = 1/2 at desk scale, capped at n.
int default_sketch_width(int m, int n);

// Deterministic given spec.seed. Throws std::invalid_argument on bad sizes
// (w < 1, s < 1, or s > w).
SketchMatrix build_sketch(int n, const SketchSpec& spec);

// A * diag(d) * W without materializing AD densely; cost O(nnz(A) * s) for the
// sparse kind.
Mat apply_sketch_right(const SpMat& A, const Vec& d, const SketchMatrix& W);

// W * u for a length-w vector u (used by the correction-vector path).
Vec apply_sketch_vec(const SketchMatrix& W, const Vec& u);

// || Z W W^T Z^T - I ||_2 for Z with orthonormal rows; diagnostic used to
// check the subspace-embedding premise. Throws std::invalid_argument if the
// rows of Z are not orthonormal to 1e-8.
double embedding_quality(const Mat& Z, const SketchMatrix& W);

}  // namespace rsipm
