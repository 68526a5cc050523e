#pragma once

#include "rsipm/sketch.hpp"
#include "rsipm/types.hpp"

namespace rsipm {

// Factored form of Q = (ADW)(ADW)^T built from the thin SVD
// ADW = U * diag(sigma_half) * V_hat^T.  Q^{-1/2} = U diag(1/sigma_half) U^T
// and (ADW)^+ = V_hat diag(1/sigma_half) U^T are applied from these factors;
// the m x m inverse root is never formed explicitly outside tests.
struct Preconditioner {
  Mat U;           // m x m orthonormal
  Vec sigma_half;  // m singular values of ADW, nonincreasing, all positive
  Mat V_hat;       // w x m, orthonormal columns
};

// Builds the factored preconditioner from the sketched matrix ADW.
// Throws RankDeficientError when min(sigma)/max(sigma) <= 1e-12, i.e. the
// sketch failed to preserve the rank of AD. Requires W.w >= A.rows and d > 0.
Preconditioner build_preconditioner(const SpMat& A, const Vec& d,
                                    const SketchMatrix& W);

// U diag(1/sigma_half) U^T * r
Vec apply_Q_inv_half(const Preconditioner& P, const Vec& r);

// Q^{-1/2} A diag(d)^2 A^T Q^{-1/2} * z via sparse products; the m x m
// operator is never materialized here.
Vec apply_precond_normal_op(const Preconditioner& P, const SpMat& A,
                            const Vec& d, const Vec& z);

// Minimum-norm solution u of (ADW) u = r:  u = V_hat diag(1/sigma_half) U^T r.
Vec apply_ADW_pinv(const Preconditioner& P, const Vec& r);

// kappa(Q^{-1/2} A D) = sqrt(lambda_max / lambda_min) of the preconditioned
// normal operator, measured by materializing the m x m operator column by
// column and taking extreme eigenvalues. Diagnostic; O(m * nnz + m^3).
double precond_condition_number(const Preconditioner& P, const SpMat& A,
                                const Vec& d);

}  // namespace rsipm
