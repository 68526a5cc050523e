#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rsipm/inner.hpp"
#include "rsipm/preconditioner.hpp"
#include "rsipm/sketch.hpp"
#include "rsipm/types.hpp"

namespace rsipm {

// Standard-form LP: min c'x  s.t.  Ax = b, x >= 0, with A short-and-fat and
// full row rank (certified lazily by the preconditioner's rank check).
struct LpProblem {
  SpMat A;
  Vec b;
  Vec c;
  int m() const { return static_cast<int>(A.rows()); }
  int n() const { return static_cast<int>(A.cols()); }
};

// Primal/dual/slack triplet with derived residuals and duality measure.
struct Iterate {
  Vec x, y, s;
  Vec r_p;    // Ax - b
  Vec r_d;    // A'y + s - c
  double mu;  // x's / n
};

Iterate make_iterate(const LpProblem& prob, Vec x, Vec y, Vec s);

struct OuterRow;

struct IpmConfig {
  double gamma = 0.99;    // neighborhood parameter, in (0,1)
  double sigma = 0.5;     // centering parameter, in (0, 4/5)
  double epsilon = 1e-9;  // outer tolerance on mu
  bool epsilon_relative = false;  // if true, stop at mu <= epsilon * mu0
  double zeta = 0.5;      // target inner decay rate, drives t_max default
  double tol_cg = 1e-5;   // inner relative residual tolerance
  int t_max = -1;         // inner iteration cap; -1 = derive from zeta (or
                          // 10*m for the unpreconditioned baseline)
  int max_outer = 1000;
  std::uint64_t seed = 0;
  InnerKind solver = InnerKind::Pcg;
  int sketch_w = -1;  // -1 = default_sketch_width(m, n)
  int sketch_s = 8;
  SketchKind sketch_kind = SketchKind::SparseEmbedding;
  double delta = -1.0;  // failure-probability knob; -1 = n^-2, feeds sizing log
  double y0 = 0.0;      // initial dual value (x0 = s0 = 1 fixed by theory)
  bool diagnostics = true;  // per-iteration condition numbers when m <= 2000
  // Invoked after each executed outer iteration (streaming metrics; rows are
  // on disk even if a later iteration throws).
  std::function<void(const OuterRow&)> on_row;
};

// Corrected Newton direction. v is the perturbation vector that restores the
// residual-collinearity invariant despite the inexact inner solve:
//   A S^{-1} v = AD^2A' dy - p   (checked to 1e-8 * max(1, ||p||)).
struct Direction {
  Vec dx, dy, ds;
  Vec v;
  InnerSolveReport report;
  // diagnostics captured for the invariant monitors
  double p_norm = 0.0;       // ||p||
  double qinv_p_norm = 0.0;  // ||Q^{-1/2} p|| (0 for the direct solver)
  double id_resid = 0.0;     // ||A S^{-1} v - (AD^2A' dy - p)||
  double vb_rhs = 0.0;       // ||f_t|| used by the perturbation bound
};

// One executed outer iteration. The CSV mirror of this row logs the state at
// the start of the iteration plus the action taken; the *_next fields record
// the monitors evaluated on the resulting iterate and stay library-side.
struct OuterRow {
  int k = 0;
  double mu = 0.0;
  double r_norm = 0.0;
  double eta = 0.0;  // ||r_k|| / ||r_0|| (1 when r_0 = 0 and r_k = 0)
  int inner_iters = 0;
  std::optional<double> kappa_precond;
  std::optional<double> kappa_unprecond;
  double alpha_bar = 0.0;
  double v_norm = 0.0;
  double wall_ms = 0.0;
  // invariant monitors
  double id_resid = 0.0;        // correction identity residual
  double id_threshold = 0.0;    // 1e-8 * max(1, ||p||)
  double vb_lhs = 0.0;          // ||v||
  double vb_rhs = 0.0;          // sqrt(3 n mu) * ||f_t||
  double col_resid_next = 0.0;  // ||r_{k+1} - eta_{k+1} r_0||
  double eta_next = 0.0;
  double mu_next = 0.0;
  bool qinvp_ok = true;         // ||Q^{-1/2}p|| <= sqrt(2) psi sqrt(mu)
};

enum class SolveStatus { Converged, Stalled, MaxOuterExceeded };

const char* solve_status_name(SolveStatus s);

struct IpmResult {
  Iterate final;
  SolveStatus status = SolveStatus::Converged;
  std::vector<OuterRow> trace;
  double r0_norm = 0.0;
  double mu0 = 0.0;
};

// ---- building blocks (exposed for tests and diagnostics) ----

Iterate initial_point(const LpProblem& prob, double y0 = 0.0);

// Right-hand side of the normal equations:
//   p = -r_p - sigma mu A S^{-1} 1 + A x - A D^2 r_d.
Vec compute_rhs_p(const LpProblem& prob, const Iterate& it, double sigma);

// Draws a fresh sketch, builds the preconditioner, runs the configured inner
// solver and assembles (dx, dy, ds, v). Verifies the correction identity
// before returning (CorrectionIdentityError on failure). For the direct
// solver no sketch is drawn and v = 0 exactly. If P_out is non-null it
// receives the preconditioner for reuse by diagnostics.
Direction build_direction(const LpProblem& prob, const Iterate& it,
                          const IpmConfig& cfg, std::uint64_t sketch_seed,
                          Preconditioner* P_out = nullptr);

// Membership in N(gamma): x_i s_i >= (1-gamma) mu  and
// ||r|| / ||r_0|| <= mu / mu_0 (for r_0 = 0 the ratio condition degenerates
// to requiring ||r|| = 0, tested against rounding noise of the recomputation).
bool neighborhood_contains(const LpProblem& prob, const Vec& x, const Vec& y,
                           const Vec& s, double gamma, double mu0,
                           double r0_norm);

// Largest alpha in [0,1] such that every alpha' in [0, alpha] keeps
// (x,y,s) + alpha' (dx,dy,ds) inside N(gamma): exact first-crossing analysis
// of the per-coordinate quadratics x_i(a)s_i(a) - (1-gamma)mu(a), the
// residual-ratio condition and the positivity constraints, then bisection
// refinement to absolute width 1e-12. Returns 0 when no positive step stays
// inside (stall signal).
double max_step_in_neighborhood(const LpProblem& prob, const Iterate& it,
                                const Direction& dir, double gamma, double mu0,
                                double r0_norm);

// Minimizer of g(a) = (x + a dx)'(s + a ds) over [0, alpha_tilde], in closed
// form from the quadratic coefficients.
double min_complementarity_step(const Iterate& it, const Direction& dir,
                                double alpha_tilde);

// Diagnostic: ||Q^{-1/2} p|| <= sqrt(2) psi sqrt(mu) with
// psi = 9n/sqrt(1-gamma) + sigma sqrt(n/(1-gamma)) + sqrt(n). A false return
// flags a premise violation; it never aborts the run.
bool qinvp_norm_monitor(double qinv_p_norm, double mu, int n, double gamma,
                        double sigma);

// The outer loop. Deterministic given cfg.seed. Stops at mu <= epsilon
// (Converged), after two consecutive zero steps or when the normal-equations
// solve can no longer meet the correction-identity tolerance (Stalled), or at
// max_outer (MaxOuterExceeded); the trace covers all executed iterations in
// every case.
IpmResult ipm_solve(const LpProblem& prob, const IpmConfig& cfg);

}  // namespace rsipm
