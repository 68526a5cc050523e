#include "rsipm/ipm.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "rsipm/rng.hpp"
#include "rsipm/svd.hpp"

namespace rsipm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec stacked_residual(const Iterate& it) {
  Vec r(it.r_p.size() + it.r_d.size());
  r << it.r_p, it.r_d;
  return r;
}

// A D^2 A' z without forming the m x m matrix.
Vec normal_apply(const SpMat& A, const Vec& d2, const Vec& z) {
  Vec t = A.transpose() * z;
  t.array() *= d2.array();
  return A * t;
}

// Dense m x m normal matrix A D^2 A'; m is small by standing assumption, so a
// dense densification of A is acceptable for the direct solver / diagnostics.
Mat dense_normal_matrix(const SpMat& A, const Vec& d2) {
  Mat Ad = Mat(A);
  Mat scaled = Ad;
  scaled.array().rowwise() *= d2.transpose().array();
  return scaled * Ad.transpose();
}

double psi_bound(int n, double gamma, double sigma) {
  const double nn = n;
  return 9.0 * nn / std::sqrt(1.0 - gamma) +
         sigma * std::sqrt(nn / (1.0 - gamma)) + std::sqrt(nn);
}

// First alpha > 0 where a*al^2 + b*al + c goes negative, given c >= 0; +inf if
// it never does. Computed via the q-form so the small root of a nearly-linear
// quadratic (|a| ~ 1e-18) does not cancel to zero.
double first_crossing(double a, double b, double c) {
  if (a == 0.0) {
    if (b >= 0.0) return kInf;
    return c / (-b);
  }
  const double disc = b * b - 4.0 * a * c;
  if (a > 0.0) {
    if (b >= 0.0 || disc <= 0.0) return kInf;
    const double q = -(b - std::sqrt(disc)) / 2.0;  // b < 0: no cancellation
    return c / q;                                   // smaller positive root
  }
  // a < 0: opens downward and starts at c >= 0, so the first crossing is the
  // positive root.
  const double sd = std::sqrt(std::max(disc, 0.0));
  const double q = (b != 0.0) ? -(b + std::copysign(sd, b)) / 2.0 : sd / 2.0;
  double best = kInf;
  if (q != 0.0 && c / q > 0.0) best = std::min(best, c / q);
  if (q / a > 0.0) best = std::min(best, q / a);
  return best;
}

int resolved_sketch_width(const LpProblem& prob, const IpmConfig& cfg) {
  if (cfg.sketch_w > 0) return cfg.sketch_w;
  int w = default_sketch_width(prob.m(), prob.n());
  if (cfg.delta > 0.0 && prob.n() >= 2) {
    // Width grows with log(1/delta); the default constant corresponds to the
    // reference failure probability n^-2.
    const double ratio =
        std::log(1.0 / cfg.delta) / (2.0 * std::log(double(prob.n())));
    w = static_cast<int>(std::ceil(w * std::max(ratio, 0.25)));
    w = std::min(w, prob.n());
    w = std::max(w, std::min(prob.n(), 2 * prob.m()));
  }
  return w;
}

void validate_config(const LpProblem& prob, const IpmConfig& cfg) {
  if (prob.A.rows() != prob.b.size() || prob.A.cols() != prob.c.size())
    throw std::invalid_argument("ipm: A/b/c dimensions disagree");
  if (prob.m() < 1 || prob.n() < 1)
    throw std::invalid_argument("ipm: empty problem");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
    throw std::invalid_argument("ipm: gamma outside (0,1)");
  if (!(cfg.sigma > 0.0 && cfg.sigma < 0.8))
    throw std::invalid_argument("ipm: sigma outside (0, 4/5)");
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("ipm: epsilon <= 0");
  if (!(cfg.tol_cg > 0.0)) throw std::invalid_argument("ipm: tol_cg <= 0");
  if (cfg.max_outer < 1) throw std::invalid_argument("ipm: max_outer < 1");
}

}  // namespace

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Stalled: return "stalled";
    case SolveStatus::MaxOuterExceeded: return "max_outer_exceeded";
  }
  return "?";
}

Iterate make_iterate(const LpProblem& prob, Vec x, Vec y, Vec s) {
  Iterate it;
  it.r_p = prob.A * x - prob.b;
  it.r_d = prob.A.transpose() * y + s - prob.c;
  it.mu = x.dot(s) / double(prob.n());
  it.x = std::move(x);
  it.y = std::move(y);
  it.s = std::move(s);
  return it;
}

Iterate initial_point(const LpProblem& prob, double y0) {
  return make_iterate(prob, Vec::Ones(prob.n()),
                      Vec::Constant(prob.m(), y0), Vec::Ones(prob.n()));
}

Vec compute_rhs_p(const LpProblem& prob, const Iterate& it, double sigma) {
  // p = -r_p - sigma mu A s^{-1} + A x - A D^2 r_d, fused into one product.
  const Vec u = it.x.array() - sigma * it.mu / it.s.array() -
                (it.x.array() / it.s.array()) * it.r_d.array();
  return prob.A * u - it.r_p;
}

bool qinvp_norm_monitor(double qinv_p_norm, double mu, int n, double gamma,
                        double sigma) {
  return qinv_p_norm <=
         std::sqrt(2.0) * psi_bound(n, gamma, sigma) * std::sqrt(mu);
}

Direction build_direction(const LpProblem& prob, const Iterate& it,
                          const IpmConfig& cfg, std::uint64_t sketch_seed,
                          Preconditioner* P_out) {
  const int m = prob.m();
  const int n = prob.n();
  const Vec d2 = it.x.cwiseQuotient(it.s);
  const Vec d = d2.cwiseSqrt();
  const Vec p = compute_rhs_p(prob, it, cfg.sigma);

  Direction dir;
  dir.p_norm = p.norm();

  Vec dy;
  Vec g;  // unpreconditioned residual A D^2 A' dy - p

  if (cfg.solver == InnerKind::Direct) {
    // No sketch is drawn on this path: the run is seed-independent and the
    // correction vector is identically zero.
    const Mat M = dense_normal_matrix(prob.A, d2);
    dy = Eigen::PartialPivLU<Mat>(M).solve(p);
    g = normal_apply(prob.A, d2, dy) - p;
    dir.v = Vec::Zero(n);
    dir.report.kind = InnerKind::Direct;
    dir.report.iterations = 0;
    dir.report.history = {dir.p_norm};
    dir.report.final_residual = g;
    dir.report.converged = true;
    dir.qinv_p_norm = 0.0;
    dir.vb_rhs = 0.0;
  } else {
    SketchSpec spec;
    spec.kind = cfg.sketch_kind;
    spec.w = resolved_sketch_width(prob, cfg);
    spec.s = std::min(cfg.sketch_s, spec.w);
    spec.seed = sketch_seed;
    const SketchMatrix W = build_sketch(n, spec);
    const Preconditioner P = build_preconditioner(prob.A, d, W);
    if (P_out) *P_out = P;

    if (cfg.solver == InnerKind::Cg) {
      const int t_max = cfg.t_max > 0 ? cfg.t_max : 10 * m;
      const LinOp op = [&](const Vec& z) {
        return normal_apply(prob.A, d2, z);
      };
      auto [z, rep] = pcg_solve(op, p, t_max, cfg.tol_cg);
      rep.kind = InnerKind::Cg;
      dy = std::move(z);
      g = rep.final_residual;
      dir.report = std::move(rep);
      dir.qinv_p_norm = apply_Q_inv_half(P, p).norm();
      dir.vb_rhs = apply_Q_inv_half(P, g).norm();
    } else {
      const int t_max =
          cfg.t_max > 0
              ? cfg.t_max
              : theoretical_inner_iters(n, cfg.gamma, cfg.sigma, cfg.zeta);
      const LinOp op = [&](const Vec& z) {
        return apply_precond_normal_op(P, prob.A, d, z);
      };
      const Vec rhs = apply_Q_inv_half(P, p);
      dir.qinv_p_norm = rhs.norm();
      std::pair<Vec, InnerSolveReport> sol;
      switch (cfg.solver) {
        case InnerKind::Pcg:
          sol = pcg_solve(op, rhs, t_max, cfg.tol_cg);
          break;
        case InnerKind::Richardson:
          sol = richardson_solve(op, rhs, t_max, cfg.tol_cg);
          break;
        case InnerKind::Sd:
          sol = sd_solve(op, rhs, t_max, cfg.tol_cg);
          break;
        default:
          throw std::logic_error("build_direction: unexpected solver kind");
      }
      dy = apply_Q_inv_half(P, sol.first);
      g = normal_apply(prob.A, d2, dy) - p;
      // measure the residual for the perturbation bound from the same g that
      // builds v: near machine precision the solver's own final_residual is
      // an independent rounding of the same quantity and the two can differ
      // by a large relative factor
      dir.vb_rhs = apply_Q_inv_half(P, g).norm();
      dir.report = std::move(sol.second);
    }

    // v = (XS)^{1/2} W (ADW)^+ g restores collinearity of the outer residuals.
    const Vec u = apply_ADW_pinv(P, g);
    dir.v = it.x.cwiseProduct(it.s).cwiseSqrt().cwiseProduct(
        apply_sketch_vec(W, u));
  }

  // The whole construction stands on A S^{-1} v = A D^2 A' dy - p; refuse to
  // hand out a direction for which it does not hold to rounding accuracy.
  const Vec id_gap = prob.A * dir.v.cwiseQuotient(it.s) - g;
  dir.id_resid = id_gap.norm();
  const double id_thr = 1e-8 * std::max(1.0, dir.p_norm);
  if (!(dir.id_resid <= id_thr))
    throw CorrectionIdentityError(
        "correction identity residual " + std::to_string(dir.id_resid) +
        " exceeds " + std::to_string(id_thr));

  dir.ds = -it.r_d - prob.A.transpose() * dy;
  dir.dx = (-it.x.array() + cfg.sigma * it.mu / it.s.array() -
            d2.array() * dir.ds.array() - dir.v.array() / it.s.array())
               .matrix();
  dir.dy = std::move(dy);
  return dir;
}

bool neighborhood_contains(const LpProblem& prob, const Vec& x, const Vec& y,
                           const Vec& s, double gamma, double mu0,
                           double r0_norm) {
  if ((x.array() <= 0.0).any() || (s.array() <= 0.0).any()) return false;
  const double mu = x.dot(s) / double(prob.n());
  const Vec xs = x.cwiseProduct(s);
  const double floor = (1.0 - gamma) * mu;
  if ((xs.array() < floor * (1.0 - 1e-12) - 1e-30).any()) return false;
  const Vec r_p = prob.A * x - prob.b;
  const Vec r_d = prob.A.transpose() * y + s - prob.c;
  const double rn = std::sqrt(r_p.squaredNorm() + r_d.squaredNorm());
  if (r0_norm > 0.0) {
    // ||r|| / ||r0|| <= mu / mu0, cross-multiplied, with rounding slack.
    return rn * mu0 <= mu * r0_norm * (1.0 + 1e-12) + 1e-30;
  }
  // Feasible start: the residual must stay at recomputation noise level.
  return rn <= 1e-10 * (1.0 + prob.b.norm() + prob.c.norm());
}

double max_step_in_neighborhood(const LpProblem& prob, const Iterate& it,
                                const Direction& dir, double gamma, double mu0,
                                double r0_norm) {
  const int n = prob.n();
  const double mu = it.mu;
  const double gmu = (it.x.dot(dir.ds) + it.s.dot(dir.dx)) / double(n);
  const double hmu = dir.dx.dot(dir.ds) / double(n);
  const double omg = 1.0 - gamma;

  double cap = 1.0;
  for (int i = 0; i < n; ++i) {
    const double a = dir.dx[i] * dir.ds[i] - omg * hmu;
    const double b = it.x[i] * dir.ds[i] + it.s[i] * dir.dx[i] - omg * gmu;
    const double c = std::max(it.x[i] * it.s[i] - omg * mu, 0.0);
    cap = std::min(cap, first_crossing(a, b, c));
  }
  if (r0_norm > 0.0) {
    const double rho =
        std::sqrt(it.r_p.squaredNorm() + it.r_d.squaredNorm()) / r0_norm;
    const double a = hmu / mu0;
    const double b = gmu / mu0 + rho;
    const double c = std::max(mu / mu0 - rho, 0.0);
    cap = std::min(cap, first_crossing(a, b, c));
  }
  for (int i = 0; i < n; ++i) {
    if (dir.dx[i] < 0.0) cap = std::min(cap, -it.x[i] / dir.dx[i]);
    if (dir.ds[i] < 0.0) cap = std::min(cap, -it.s[i] / dir.ds[i]);
  }
  if (cap <= 0.0) return 0.0;

  const auto member = [&](double a) {
    return neighborhood_contains(prob, it.x + a * dir.dx, it.y + a * dir.dy,
                                 it.s + a * dir.ds, gamma, mu0, r0_norm);
  };
  if (member(cap)) return cap;
  // The crossing analysis works on the exactly-scaled residual; verify against
  // recomputed residuals and back off to the verified part of [0, cap].
  double lo = 0.0, hi = cap;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (member(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double min_complementarity_step(const Iterate& it, const Direction& dir,
                                double alpha_tilde) {
  const double g1 = it.x.dot(dir.ds) + it.s.dot(dir.dx);
  const double g2 = dir.dx.dot(dir.ds);
  if (g2 > 0.0) {
    const double a = -g1 / (2.0 * g2);
    return std::min(std::max(a, 0.0), alpha_tilde);
  }
  // Concave or linear: the minimum over [0, alpha_tilde] is at an endpoint.
  return (g1 * alpha_tilde + g2 * alpha_tilde * alpha_tilde <= 0.0)
             ? alpha_tilde
             : 0.0;
}

IpmResult ipm_solve(const LpProblem& prob, const IpmConfig& cfg) {
  using clock = std::chrono::steady_clock;
  validate_config(prob, cfg);

  const int m = prob.m();
  const int n = prob.n();
  IpmResult res;
  Iterate it = initial_point(prob, cfg.y0);
  res.mu0 = it.mu;
  const Vec r0 = stacked_residual(it);
  res.r0_norm = r0.norm();
  const double eps_eff =
      cfg.epsilon_relative ? cfg.epsilon * res.mu0 : cfg.epsilon;
  const std::uint64_t seed_base = splitmix64(cfg.seed);
  const bool sketched = cfg.solver != InnerKind::Direct;
  const bool preconditioned =
      sketched && cfg.solver != InnerKind::Cg;

  res.status = SolveStatus::MaxOuterExceeded;
  int stall_streak = 0;
  for (int k = 0; k < cfg.max_outer; ++k) {
    if (it.mu <= eps_eff) {
      res.status = SolveStatus::Converged;
      break;
    }
    const auto t0 = clock::now();

    OuterRow row;
    row.k = k;
    row.mu = it.mu;
    row.r_norm = std::sqrt(it.r_p.squaredNorm() + it.r_d.squaredNorm());
    row.eta = res.r0_norm > 0.0 ? row.r_norm / res.r0_norm : 1.0;

    const std::uint64_t sketch_seed =
        splitmix64(seed_base ^ static_cast<std::uint64_t>(k));
    Preconditioner P;
    Direction dir;
    try {
      dir = build_direction(prob, it, cfg, sketch_seed, &P);
    } catch (const CorrectionIdentityError&) {
      // the normal-equations solve can no longer meet the identity tolerance
      // (extreme D scaling near a degenerate face); stop with the last good
      // iterate instead of propagating an unusable direction
      res.status = SolveStatus::Stalled;
      break;
    }

    if (cfg.diagnostics && m <= 2000) {
      const Vec d2 = it.x.cwiseQuotient(it.s);
      if (preconditioned) {
        try {
          row.kappa_precond =
              precond_condition_number(P, prob.A, d2.cwiseSqrt());
        } catch (const std::runtime_error&) {
          // operator numerically indefinite at this iterate; leave the field
          // empty rather than log a fabricated value
        }
      }
      try {
        const Mat M = dense_normal_matrix(prob.A, d2);
        const auto [lo, hi] = sym_eig_extremes(0.5 * (M + M.transpose()));
        if (lo > 0.0) row.kappa_unprecond = std::sqrt(hi / lo);
      } catch (const std::exception&) {
      }
    }

    const double alpha_tilde = max_step_in_neighborhood(
        prob, it, dir, cfg.gamma, res.mu0, res.r0_norm);
    const double alpha_bar = min_complementarity_step(it, dir, alpha_tilde);

    row.inner_iters = dir.report.iterations;
    row.v_norm = dir.v.norm();
    row.id_resid = dir.id_resid;
    row.id_threshold = 1e-8 * std::max(1.0, dir.p_norm);
    row.vb_lhs = row.v_norm;
    row.vb_rhs = std::sqrt(3.0 * n * it.mu) * dir.vb_rhs;
    row.qinvp_ok =
        qinvp_norm_monitor(dir.qinv_p_norm, it.mu, n, cfg.gamma, cfg.sigma);

    if (alpha_bar <= 0.0) {
      row.alpha_bar = 0.0;
      row.mu_next = it.mu;
      row.eta_next = row.eta;
      row.col_resid_next = res.r0_norm > 0.0
                               ? (stacked_residual(it) - row.eta * r0).norm()
                               : row.r_norm;
      row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0)
                        .count();
      res.trace.push_back(row);
      if (cfg.on_row) cfg.on_row(row);
      if (++stall_streak >= 2) {
        res.status = SolveStatus::Stalled;
        break;
      }
      continue;  // fresh sketch next iteration
    }
    stall_streak = 0;

    it = make_iterate(prob, it.x + alpha_bar * dir.dx,
                      it.y + alpha_bar * dir.dy, it.s + alpha_bar * dir.ds);
    const Vec r_next = stacked_residual(it);
    row.alpha_bar = alpha_bar;
    row.mu_next = it.mu;
    row.eta_next = res.r0_norm > 0.0 ? r_next.norm() / res.r0_norm : 1.0;
    row.col_resid_next = res.r0_norm > 0.0
                             ? (r_next - row.eta_next * r0).norm()
                             : r_next.norm();
    row.wall_ms =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    res.trace.push_back(row);
    if (cfg.on_row) cfg.on_row(row);
  }

  if (res.status == SolveStatus::MaxOuterExceeded && it.mu <= eps_eff)
    res.status = SolveStatus::Converged;
  res.final = std::move(it);
  return res;
}

}  // namespace rsipm
