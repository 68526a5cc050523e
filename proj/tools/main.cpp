#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rsipm/io.hpp"
#include "rsipm/ipm.hpp"
#include "rsipm/metrics.hpp"
#include "rsipm/rng.hpp"

namespace {

using rsipm::fmt_double;
using rsipm::InnerKind;

struct SolveOpts {
  std::string lp_path;
  std::string solver = "pcg";
  double sigma = 0.5;
  double gamma = 0.99;
  double eps = 1e-9;
  bool eps_relative = false;
  double tol_cg = 1e-5;
  int w = -1;
  int s = 8;
  std::string sketch_kind = "sparse";
  double zeta = 0.5;
  double delta = -1.0;
  std::uint64_t seed = 0;
  int max_outer = 1000;
  int t_max = -1;
  double y0 = 0.0;
  std::string timing = "wall";
  bool verbose = false;
  std::string config_path;
};

// Flat key=value config file: each key names a long option of the subcommand
// (same spelling, no leading dashes). Values go through the option's own
// converter and validators; anything given on the command line wins.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file: cannot open " + path);
  const auto strip = [](const std::string& t) {
    const auto a = t.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    return t.substr(a, t.find_last_not_of(" \t\r") - a + 1);
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string entry = strip(line);
    if (entry.empty() || entry[0] == '#' || entry[0] == ';') continue;
    const auto err = [&](const std::string& msg) {
      return std::invalid_argument("config file line " +
                                   std::to_string(lineno) + ": " + msg);
    };
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw err("expected key=value");
    const std::string key = strip(entry.substr(0, eq));
    std::string value = strip(entry.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    CLI::Option* opt =
        key == "config" ? nullptr : cmd->get_option_no_throw("--" + key);
    if (!opt) throw err("unknown key \"" + key + "\"");
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw err(e.what());
    }
  }
}

InnerKind parse_solver(const std::string& name) {
  if (name == "pcg") return InnerKind::Pcg;
  if (name == "cg" || name == "unpreconditioned-cg") return InnerKind::Cg;
  if (name == "richardson") return InnerKind::Richardson;
  if (name == "sd") return InnerKind::Sd;
  if (name == "direct") return InnerKind::Direct;
  throw CLI::ValidationError("--solver", "unknown solver \"" + name + "\"");
}

rsipm::IpmConfig make_config(const SolveOpts& o) {
  rsipm::IpmConfig cfg;
  cfg.gamma = o.gamma;
  cfg.sigma = o.sigma;
  cfg.epsilon = o.eps;
  cfg.epsilon_relative = o.eps_relative;
  cfg.zeta = o.zeta;
  cfg.tol_cg = o.tol_cg;
  cfg.t_max = o.t_max;
  cfg.max_outer = o.max_outer;
  cfg.seed = o.seed;
  cfg.solver = parse_solver(o.solver);
  cfg.sketch_w = o.w;
  cfg.sketch_s = o.s;
  cfg.sketch_kind = o.sketch_kind == "gaussian"
                        ? rsipm::SketchKind::Gaussian
                        : rsipm::SketchKind::SparseEmbedding;
  cfg.delta = o.delta;
  cfg.y0 = o.y0;
  return cfg;
}

void add_solver_flags(CLI::App* cmd, SolveOpts& o, bool with_solver) {
  cmd->add_option("--lp", o.lp_path, "LP problem file (JSON)")->required();
  if (with_solver)
    cmd->add_option("--solver", o.solver,
                    "inner solver: pcg|cg|richardson|sd|direct")
        ->check(CLI::IsMember(
            {"pcg", "cg", "unpreconditioned-cg", "richardson", "sd",
             "direct"}));
  cmd->add_option("--sigma", o.sigma, "centering parameter in (0, 4/5)");
  cmd->add_option("--gamma", o.gamma, "neighborhood parameter in (0,1)");
  cmd->add_option("--eps", o.eps, "outer tolerance on mu");
  cmd->add_flag("--eps-relative", o.eps_relative,
                "interpret --eps relative to the initial mu");
  cmd->add_option("--tol-cg", o.tol_cg, "inner relative residual tolerance");
  cmd->add_option("--w", o.w, "sketch width (default: sized from m, n)");
  cmd->add_option("--s", o.s, "sketch nonzeros per row (sparse kind)");
  cmd->add_option("--sketch-kind", o.sketch_kind, "sparse|gaussian")
      ->check(CLI::IsMember({"sparse", "gaussian"}));
  cmd->add_option("--zeta", o.zeta, "target inner decay rate in (0,1)");
  cmd->add_option("--delta", o.delta,
                  "sketch failure-probability knob (default n^-2)");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--max-outer", o.max_outer, "outer iteration cap");
  cmd->add_option("--t-max", o.t_max, "inner iteration cap override");
  cmd->add_option("--y0", o.y0, "initial dual value (y = y0 * ones)");
  cmd->add_option("--timing", o.timing,
                  "wall: record wall_ms; none: write 0 (reproducible CSV)")
      ->check(CLI::IsMember({"wall", "none"}));
  cmd->add_flag("--verbose", o.verbose, "per-iteration progress on stdout");
  cmd->add_option("--config", o.config_path,
                  "key=value config file (flags win)");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int run_solve(const SolveOpts& opts, const std::string& metrics_path,
              const std::string& solution_path, const std::string& run_id_in) {
  const rsipm::LpProblem prob = rsipm::read_lp(opts.lp_path);
  rsipm::IpmConfig cfg = make_config(opts);

  const std::string run_id =
      run_id_in.empty()
          ? std::string(rsipm::inner_kind_name(cfg.solver)) + "-" +
                std::to_string(opts.seed)
          : run_id_in;
  std::optional<rsipm::MetricsWriter> writer;
  if (!metrics_path.empty()) {
    writer.emplace(metrics_path, opts.timing == "wall");
    if (!writer->ok())
      throw rsipm::SchemaError("cannot open " + metrics_path +
                               " for writing");
  }
  cfg.on_row = [&](const rsipm::OuterRow& row) {
    if (writer) writer->write_row(run_id, row);
    if (opts.verbose)
      std::cout << "k=" << row.k << " mu=" << fmt_double(row.mu)
                << " eta=" << fmt_double(row.eta)
                << " inner=" << row.inner_iters
                << " alpha=" << fmt_double(row.alpha_bar) << "\n";
  };

  const rsipm::IpmResult res = rsipm::ipm_solve(prob, cfg);

  if (!solution_path.empty()) {
    nlohmann::ordered_json j;
    j["objective"] = prob.c.dot(res.final.x);
    j["mu"] = res.final.mu;
    j["x"] = std::vector<double>(res.final.x.data(),
                                 res.final.x.data() + res.final.x.size());
    j["y"] = std::vector<double>(res.final.y.data(),
                                 res.final.y.data() + res.final.y.size());
    j["s"] = std::vector<double>(res.final.s.data(),
                                 res.final.s.data() + res.final.s.size());
    j["converged"] = res.status == rsipm::SolveStatus::Converged;
    j["status"] = rsipm::solve_status_name(res.status);
    j["outer_iters"] = res.trace.size();
    std::ofstream out(solution_path, std::ios::binary);
    if (!out)
      throw rsipm::SchemaError("cannot open " + solution_path +
                               " for writing");
    out << j.dump() << "\n";
  }

  if (res.status != rsipm::SolveStatus::Converged) {
    std::cerr << "solve: " << rsipm::solve_status_name(res.status)
              << " after " << res.trace.size()
              << " iterations, mu = " << fmt_double(res.final.mu) << "\n";
    return 2;
  }
  return 0;
}

int run_compare(const SolveOpts& opts, int seeds,
                const std::vector<std::string>& kinds,
                const std::string& out_path) {
  const rsipm::LpProblem prob = rsipm::read_lp(opts.lp_path);

  std::ofstream out(out_path, std::ios::binary);
  if (!out)
    throw rsipm::SchemaError("cannot open " + out_path + " for writing");
  out << "solver,runs,converged,outer_iters,inner_max,inner_median,"
         "kappa_precond_median,kappa_unprecond_median,relative_error\n";
  out.flush();

  // The direct run is the accuracy reference for every other kind. It draws
  // no randomness, so one run serves all seeds.
  rsipm::IpmConfig direct_cfg = make_config(opts);
  direct_cfg.solver = InnerKind::Direct;
  const rsipm::IpmResult direct_ref = rsipm::ipm_solve(prob, direct_cfg);
  const double direct_x_norm = direct_ref.final.x.norm();

  // Emission order is fixed; "direct" first since it anchors the comparison.
  const std::vector<std::string> order = {"direct", "pcg", "cg", "richardson",
                                          "sd"};
  for (std::size_t ki = 0; ki < order.size(); ++ki) {
    const std::string& name = order[ki];
    if (std::find(kinds.begin(), kinds.end(), name) == kinds.end()) continue;
    const InnerKind kind = parse_solver(name);

    int converged = 0;
    int inner_max = 0;
    std::vector<double> outer_counts, inner_all, kp_all, ku_all, rel_all;
    for (int run = 0; run < seeds; ++run) {
      rsipm::IpmConfig cfg = make_config(opts);
      cfg.solver = kind;
      cfg.seed = rsipm::splitmix64(
          rsipm::splitmix64(opts.seed ^ (0xC0FFEEULL + ki)) +
          static_cast<std::uint64_t>(run));
      const rsipm::IpmResult res = kind == InnerKind::Direct
                                       ? direct_ref
                                       : rsipm::ipm_solve(prob, cfg);
      if (res.status == rsipm::SolveStatus::Converged) ++converged;
      outer_counts.push_back(static_cast<double>(res.trace.size()));
      for (const auto& row : res.trace) {
        inner_max = std::max(inner_max, row.inner_iters);
        inner_all.push_back(static_cast<double>(row.inner_iters));
        if (row.kappa_precond) kp_all.push_back(*row.kappa_precond);
        if (row.kappa_unprecond) ku_all.push_back(*row.kappa_unprecond);
      }
      if (kind != InnerKind::Direct && direct_x_norm > 0.0)
        rel_all.push_back((res.final.x - direct_ref.final.x).norm() /
                          direct_x_norm);
      if (opts.verbose)
        std::cout << name << " run " << run << ": "
                  << rsipm::solve_status_name(res.status) << " in "
                  << res.trace.size() << " outer iterations\n";
    }

    out << name << ',' << seeds << ',' << converged << ','
        << fmt_double(median(outer_counts)) << ',' << inner_max << ','
        << fmt_double(inner_all.empty() ? 0.0 : median(inner_all)) << ',';
    if (!kp_all.empty()) out << fmt_double(median(kp_all));
    out << ',';
    if (!ku_all.empty()) out << fmt_double(median(ku_all));
    out << ',';
    if (kind == InnerKind::Direct)
      out << fmt_double(0.0);
    else if (!rel_all.empty())
      out << fmt_double(median(rel_all));
    out << '\n';
    out.flush();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketched interior-point LP solver and benchmark harness"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic LP");
  int gm = 0, gn = 0;
  double gdensity = 1.0;
  std::uint64_t gseed = 0;
  std::string gout;
  gen->add_option("--m", gm, "rows")->required();
  gen->add_option("--n", gn, "columns (m <= n)")->required();
  gen->add_option("--density", gdensity, "entry keep probability in (0,1]");
  gen->add_option("--seed", gseed, "RNG seed");
  gen->add_option("--out", gout, "output LP file")->required();

  // svm2lp
  auto* svm = app.add_subcommand(
      "svm2lp", "convert a libsvm dataset to an l1-SVM LP");
  std::string sin, sout;
  svm->add_option("--in", sin, "libsvm input file")->required();
  svm->add_option("--out", sout, "output LP file")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "run the IPM on an LP file");
  SolveOpts sopts;
  std::string metrics_path, solution_path, run_id;
  add_solver_flags(solve, sopts, true);
  solve->add_option("--metrics", metrics_path, "per-iteration CSV output");
  solve->add_option("--solution", solution_path, "final iterate JSON output");
  solve->add_option("--run-id", run_id,
                    "run_id column value (default: <solver>-<seed>)");

  // compare
  auto* cmp = app.add_subcommand(
      "compare", "run several solver kinds and summarize one row per kind");
  SolveOpts copts;
  int cseeds = 1;
  std::string cout_path;
  std::vector<std::string> ckinds = {"direct", "pcg", "cg", "richardson",
                                     "sd"};
  add_solver_flags(cmp, copts, false);
  cmp->add_option("--seeds", cseeds, "independent runs per solver kind")
      ->check(CLI::PositiveNumber);
  cmp->add_option("--out", cout_path, "summary CSV output")->required();
  cmp->add_option("--solvers", ckinds, "subset of solver kinds to run")
      ->delimiter(',')
      ->check(CLI::IsMember(
          {"pcg", "cg", "richardson", "sd", "direct"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen) {
      rsipm::SyntheticSpec spec;
      spec.m = gm;
      spec.n = gn;
      spec.density = gdensity;
      spec.seed = gseed;
      rsipm::write_lp(rsipm::gen_synthetic(spec), gout);
      return 0;
    }
    if (*svm) {
      rsipm::write_lp(rsipm::svm_to_lp(rsipm::read_libsvm(sin)), sout);
      return 0;
    }
    if (*solve) {
      if (!sopts.config_path.empty())
        apply_config_file(solve, sopts.config_path);
      return run_solve(sopts, metrics_path, solution_path, run_id);
    }
    if (*cmp) {
      if (!copts.config_path.empty()) apply_config_file(cmp, copts.config_path);
      return run_compare(copts, cseeds, ckinds, cout_path);
    }
  } catch (const rsipm::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    // solver-side failures (rank deficiency, divergence, identity breakdown)
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
