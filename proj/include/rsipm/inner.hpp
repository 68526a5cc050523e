#pragma once

#include <functional>
#include <vector>

#include "rsipm/types.hpp"

namespace rsipm {

enum class InnerKind { Pcg, Cg, Richardson, Sd, Direct };

const char* inner_kind_name(InnerKind k);

// Shared result of one inner solve. history[j] is the true residual norm
// ||op(z_j) - rhs|| recomputed at step j (not the recursive estimate), so
// history.size() == iterations + 1 and history[0] == ||rhs||.
struct InnerSolveReport {
  InnerKind kind = InnerKind::Pcg;
  int iterations = 0;
  std::vector<double> history;
  Vec final_residual;  // f_t = op(z_t) - rhs
  bool converged = false;
};

using LinOp = std::function<Vec(const Vec&)>;

// Standard CG from z0 = 0 on an SPD operator; stops when the true residual
// drops below tol * ||rhs|| or after t_max steps. Throws std::runtime_error on
// nonpositive search-direction curvature (operator not SPD, i.e. the
// preconditioner failed upstream).
std::pair<Vec, InnerSolveReport> pcg_solve(const LinOp& op, const Vec& rhs,
                                           int t_max, double tol);

// Richardson iteration z_j = z_{j-1} + (rhs - op(z_{j-1})); residuals satisfy
// f_j = (I - op) f_{j-1}. Same stopping rule as pcg_solve. Throws
// std::runtime_error after 5 consecutive residual increases (divergence:
// ||I - op|| >= 1, the embedding premise does not hold).
std::pair<Vec, InnerSolveReport> richardson_solve(const LinOp& op,
                                                  const Vec& rhs, int t_max,
                                                  double tol);

// Steepest descent with exact line search: alpha_j = f'f / (f' op f). A zero
// denominator means the residual is already zero and the solve returns
// converged. step_sizes (if non-null) receives each alpha_j.
std::pair<Vec, InnerSolveReport> sd_solve(const LinOp& op, const Vec& rhs,
                                          int t_max, double tol,
                                          std::vector<double>* step_sizes = nullptr);

// Iteration count sufficient for the inner residual to fall below the level
// the step-size analysis needs:
//   t = ceil( log(4 sqrt(6 n) psi / (gamma sigma)) / log(1/zeta) ),
//   psi = 9n/sqrt(1-gamma) + sigma sqrt(n/(1-gamma)) + sqrt(n).
// Used as the default t_max cap for the preconditioned solvers. Throws
// std::invalid_argument outside 0<gamma<1, 0<sigma<4/5, 0<zeta<1 or when
// zeta >= 0.999 (the bound blows up as zeta -> 1).
int theoretical_inner_iters(int n, double gamma, double sigma, double zeta);

}  // namespace rsipm
