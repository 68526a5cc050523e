#include "rsipm/inner.hpp"

#include <cmath>
#include <stdexcept>

namespace rsipm {

const char* inner_kind_name(InnerKind k) {
  switch (k) {
    case InnerKind::Pcg: return "pcg";
    case InnerKind::Cg: return "cg";
    case InnerKind::Richardson: return "richardson";
    case InnerKind::Sd: return "sd";
    case InnerKind::Direct: return "direct";
  }
  return "?";
}

namespace {

// Shared setup: residual convention is f = op(z) - rhs, so f0 = -rhs.
InnerSolveReport init_report(InnerKind kind, const Vec& rhs) {
  InnerSolveReport rep;
  rep.kind = kind;
  rep.history.push_back(rhs.norm());
  rep.final_residual = -rhs;
  return rep;
}

bool done(const InnerSolveReport& rep, double tol) {
  return rep.history.back() <= tol * rep.history.front();
}

}  // namespace

std::pair<Vec, InnerSolveReport> pcg_solve(const LinOp& op, const Vec& rhs,
                                           int t_max, double tol) {
  Vec z = Vec::Zero(rhs.size());
  InnerSolveReport rep = init_report(InnerKind::Pcg, rhs);
  if (rep.history[0] == 0.0) {
    rep.converged = true;
    return {z, rep};
  }
  Vec r = rhs;  // CG residual b - Az (= -f)
  Vec p = r;
  double rs = r.squaredNorm();
  while (!done(rep, tol) && rep.iterations < t_max) {
    const Vec Ap = op(p);
    const double curv = p.dot(Ap);
    if (curv <= 0.0)
      throw std::runtime_error(
          "pcg_solve: nonpositive curvature, operator is not SPD");
    const double alpha = rs / curv;
    z += alpha * p;
    rep.final_residual = op(z) - rhs;  // true residual, not the recursion
    rep.history.push_back(rep.final_residual.norm());
    ++rep.iterations;
    const Vec r_new = -rep.final_residual;
    const double rs_new = r_new.squaredNorm();
    p = r_new + (rs_new / rs) * p;
    r = r_new;
    rs = rs_new;
  }
  rep.converged = done(rep, tol);
  return {z, rep};
}

std::pair<Vec, InnerSolveReport> richardson_solve(const LinOp& op,
                                                  const Vec& rhs, int t_max,
                                                  double tol) {
  Vec z = Vec::Zero(rhs.size());
  InnerSolveReport rep = init_report(InnerKind::Richardson, rhs);
  if (rep.history[0] == 0.0) {
    rep.converged = true;
    return {z, rep};
  }
  int growth_streak = 0;
  while (!done(rep, tol) && rep.iterations < t_max) {
    z += rhs - op(z);
    rep.final_residual = op(z) - rhs;
    const double h = rep.final_residual.norm();
    growth_streak = (h > rep.history.back()) ? growth_streak + 1 : 0;
    rep.history.push_back(h);
    ++rep.iterations;
    if (growth_streak >= 5)
      throw std::runtime_error(
          "richardson_solve: residual grew 5 consecutive steps; ||I - op|| "
          ">= 1 (sketch too weak)");
  }
  rep.converged = done(rep, tol);
  return {z, rep};
}

std::pair<Vec, InnerSolveReport> sd_solve(const LinOp& op, const Vec& rhs,
                                          int t_max, double tol,
                                          std::vector<double>* step_sizes) {
  Vec z = Vec::Zero(rhs.size());
  InnerSolveReport rep = init_report(InnerKind::Sd, rhs);
  if (rep.history[0] == 0.0) {
    rep.converged = true;
    return {z, rep};
  }
  while (!done(rep, tol) && rep.iterations < t_max) {
    const Vec f = rep.final_residual;
    const Vec opf = op(f);
    const double denom = f.dot(opf);
    if (denom == 0.0) {  // residual is zero; exact line search has converged
      rep.converged = true;
      return {z, rep};
    }
    const double alpha = f.squaredNorm() / denom;
    if (step_sizes) step_sizes->push_back(alpha);
    z -= alpha * f;
    rep.final_residual = op(z) - rhs;
    rep.history.push_back(rep.final_residual.norm());
    ++rep.iterations;
  }
  rep.converged = done(rep, tol);
  return {z, rep};
}

int theoretical_inner_iters(int n, double gamma, double sigma, double zeta) {
  if (n < 1) throw std::invalid_argument("theoretical_inner_iters: n < 1");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("theoretical_inner_iters: gamma outside (0,1)");
  if (!(sigma > 0.0 && sigma < 0.8))
    throw std::invalid_argument(
        "theoretical_inner_iters: sigma outside (0, 4/5)");
  if (!(zeta > 0.0 && zeta < 0.999))
    throw std::invalid_argument(
        "theoretical_inner_iters: zeta outside (0, 0.999)");
  const double nn = n;
  const double psi = 9.0 * nn / std::sqrt(1.0 - gamma) +
                     sigma * std::sqrt(nn / (1.0 - gamma)) + std::sqrt(nn);
  const double t =
      std::log(4.0 * std::sqrt(6.0 * nn) * psi / (gamma * sigma)) /
      std::log(1.0 / zeta);
  return static_cast<int>(std::ceil(t));
}

}  // namespace rsipm
