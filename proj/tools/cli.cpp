#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "crackdual/capacity.hpp"
#include "crackdual/config.hpp"
#include "crackdual/dual.hpp"
#include "crackdual/errors.hpp"
#include "crackdual/gamma_lab.hpp"
#include "crackdual/primal.hpp"
#include "crackdual/report.hpp"

namespace crackdual::cli {

namespace {

struct Flags {
  std::string config;
  std::string out = ".";
  std::optional<double> resolution;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<double> p;
  std::vector<std::string> sets;
  // File being read, for error messages.
  mutable std::string source;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::non_convergence:
    case ErrorKind::singular_evaluation:
    case ErrorKind::flux_not_conservative:
    case ErrorKind::invalid_dual_field:
    case ErrorKind::unsupported_conjugate:
      return numeric_failure;
    default:
      return config_error;
  }
}

RunConfig load(const Flags& fl) {
  fl.source = fl.config;
  RunConfig cfg = load_config(fl.config);
  fl.source.clear();
  if (fl.p) {
    if (!(*fl.p > 1)) throw ConfigError("p must be > 1");
    cfg.p = *fl.p;
    cfg.gamma.p = *fl.p;
  }
  if (fl.resolution) {
    if (!(*fl.resolution > 0)) throw ConfigError("resolution must be positive");
    cfg.resolution = *fl.resolution;
    cfg.gamma.resolution = *fl.resolution;
    cfg.capacity_resolutions = {*fl.resolution};
  }
  if (fl.tol) {
    if (*fl.tol < 0) throw ConfigError("tol must be >= 0");
    cfg.tol = *fl.tol;
    cfg.gamma.tol = *fl.tol;
    cfg.capacity.tol = *fl.tol;
  }
  if (fl.seed) {
    cfg.seed = *fl.seed;
    cfg.gamma.seed = *fl.seed;
  }
  return cfg;
}

std::string out_path(const Flags& fl, const std::string& name) {
  return (std::filesystem::path(fl.out) / name).string();
}

void prepare_out(const Flags& fl) {
  std::error_code ec;
  std::filesystem::create_directories(fl.out, ec);
  if (ec) throw ConfigError("cannot create output directory " + fl.out);
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions opt;
  opt.tol = cfg.tol;
  opt.max_iter = cfg.max_iter;
  opt.throw_on_failure = false;
  return opt;
}

void describe(const RunConfig& cfg, const ProblemSetup& s, Summary& sum) {
  sum.label("config", cfg.path);
  if (cfg.geometry.example) {
    sum.label("example", to_string(*cfg.geometry.example));
    sum.label("member", cfg.geometry.h ? "h = " + std::to_string(*cfg.geometry.h) : "limit");
  } else {
    sum.label("example", "custom");
  }
  sum.add("p", *cfg.p);
  sum.add("epsilon", cfg.epsilon);
  sum.add("resolution", cfg.resolution);
  sum.add("seed", static_cast<double>(cfg.seed));
  sum.add("dofs", s.mesh.dof_count());
  sum.add("cells", s.mesh.cell_count());
  sum.add("components", s.mesh.partition.count);
}

void add_report(Summary& sum, const std::string& prefix, const SolveReport& r) {
  sum.add(prefix + "energy", r.energy);
  sum.add(prefix + "iterations", r.iterations);
  sum.add(prefix + "residual", r.residual);
  sum.add(prefix + "tol", r.tol);
  sum.add(prefix + "converged", r.converged ? 1 : 0);
}

int cmd_solve(const Flags& fl, std::ostream& out) {
  const RunConfig cfg = load(fl);
  const ProblemSetup s = make_problem(cfg);
  prepare_out(fl);
  const PrimalSolution sol = solve_primal(s.mesh, s.f, s.g, solve_options(cfg));
  write_field_csv(s.mesh, sol.u, out_path(fl, "u.csv"));
  Summary sum;
  sum.label("command", "solve");
  describe(cfg, s, sum);
  add_report(sum, "", sol.report);
  write_summary(sum, out_path(fl, "report.txt"), out_path(fl, "summary.csv"));
  out << "energy " << format_number(sol.report.energy) << '\n';
  out << "iterations " << sol.report.iterations << '\n';
  out << "residual " << format_number(sol.report.residual) << '\n';
  if (!sol.report.converged) {
    out << "not converged\n";
    return numeric_failure;
  }
  return ok;
}

int cmd_dual(const Flags& fl, std::ostream& out) {
  const RunConfig cfg = load(fl);
  const ProblemSetup s = make_problem(cfg);
  if (cfg.dual_method == DualMethod::conjugate && !s.domain.simply_connected())
    throw Error(ErrorKind::unsupported, "domain not simply connected");
  prepare_out(fl);
  const SolveOptions opt = solve_options(cfg);
  const PrimalSolution prim = solve_primal(s.mesh, s.f, s.g, opt);
  const ConjugateIntegrand fstar = conjugate(s.f);
  Summary sum;
  sum.label("command", "dual");
  sum.label("method", cfg.dual_method == DualMethod::solve ? "solve" : "conjugate");
  describe(cfg, s, sum);
  add_report(sum, "primal_", prim.report);
  DualField v;
  bool converged = prim.report.converged;
  if (cfg.dual_method == DualMethod::solve) {
    const DualSolution d = solve_dual(s.mesh, fstar, s.g, s.mesh.partition, opt);
    v = d.field;
    add_report(sum, "dual_", d.report);
    converged = converged && d.report.converged;
  } else {
    ConjugateDiagnostics diag;
    v = conjugate_from_primal(s.mesh, s.f, prim.u, &diag);
    sum.add("dual_energy", dual_value(s.mesh, fstar, v, s.g));
    sum.add("path_dependence", diag.path_dependence);
    sum.add("residual_l1", diag.residual_l1);
    sum.add("residual_dual_norm", diag.residual_dual_norm);
    sum.add("projection_distance", diag.projection_distance);
  }
  const double gap = duality_gap(s.mesh, s.f, fstar, prim.u, v, s.g);
  sum.add("gap", gap);
  for (std::size_t c = 0; c < v.component_values.size(); ++c)
    sum.add("comp_" + std::to_string(c), v.component_values[c]);
  write_edge_field_csv(s.mesh, v.v, out_path(fl, "v.csv"));
  {
    std::ofstream os(out_path(fl, "components.csv"));
    if (!os) throw ConfigError("cannot write components.csv");
    os << "component,value\n";
    for (std::size_t c = 0; c < v.component_values.size(); ++c)
      os << c << ',' << format_number(v.component_values[c]) << '\n';
  }
  write_summary(sum, out_path(fl, "report.txt"), out_path(fl, "summary.csv"));
  out << "gap " << format_number(gap) << '\n';
  for (std::size_t c = 0; c < v.component_values.size(); ++c)
    out << "component " << c << ' ' << format_number(v.component_values[c]) << '\n';
  if (!converged) {
    out << "not converged\n";
    return numeric_failure;
  }
  return ok;
}

int cmd_gamma(const Flags& fl, std::ostream& out) {
  const RunConfig cfg = load(fl);
  if (!cfg.geometry.example) throw ConfigError("gamma needs an example");
  prepare_out(fl);
  const ConvergenceReport rep = run_experiment(cfg.gamma);
  write_convergence_report(rep, out_path(fl, "report.txt"));
  write_rows_csv(rep, out_path(fl, "rows.csv"));
  write_row_details_csv(rep, out_path(fl, "rows_detail.csv"));
  write_metrics_csv(rep, out_path(fl, "metrics.csv"));
  write_verdicts_csv(rep, out_path(fl, "verdicts.csv"));
  write_field_csv(rep.limit_mesh, rep.limit_u, out_path(fl, "limit_u.csv"));
  for (const Verdict& v : rep.verdicts) out << verdict_line(v) << '\n';
  for (const std::string& n : rep.notes) out << "note: " << n << '\n';
  const bool converged = std::all_of(rep.rows.begin(), rep.rows.end(),
                                     [](const HRow& r) { return r.converged; });
  return converged ? ok : numeric_failure;
}

int cmd_capacity(const Flags& fl, std::ostream& out) {
  const RunConfig cfg = load(fl);
  if (!cfg.has_capacity) throw ConfigError("config has no capacity block");
  prepare_out(fl);
  const std::vector<CapacityRow> rows = capacity_table(cfg.capacity, cfg.capacity_resolutions);
  write_capacity_csv(rows, cfg.capacity.r, out_path(fl, "capacity.csv"));
  write_capacity_report(rows, cfg.capacity.r, out_path(fl, "report.txt"));
  out << "resolution,delta,estimate\n";
  bool converged = true;
  for (const CapacityRow& r : rows) {
    out << format_number(r.resolution) << ',' << format_number(r.delta) << ','
        << format_number(r.estimate) << '\n';
    converged = converged && r.converged;
  }
  return converged ? ok : numeric_failure;
}

int cmd_hausdorff(const Flags& fl, std::ostream& out) {
  fl.source = fl.sets[0];
  const SetFile a = load_set_file(fl.sets[0]);
  fl.source = fl.sets[1];
  const SetFile b = load_set_file(fl.sets[1]);
  fl.source.clear();
  std::optional<Domain> dom = a.domain ? a.domain : b.domain;
  if (!fl.config.empty()) {
    const RunConfig cfg = load(fl);
    if (cfg.geometry.example) dom = example_domain(*cfg.geometry.example);
    else dom = cfg.geometry.domain;
  }
  if (!dom) throw ConfigError("hausdorff needs a domain from a set file or --config");
  out << format_number(hausdorff_distance(a.set, b.set, *dom)) << '\n';
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Crack problems: primal and dual solves, limit experiments, capacities"};
  app.require_subcommand(1);
  Flags fl;
  auto common = [&](CLI::App* sub, bool need_config) {
    auto* c = sub->add_option("--config", fl.config, "Config document (YAML)");
    if (need_config) c->required();
    sub->add_option("--out", fl.out, "Output directory");
    sub->add_option("--resolution", fl.resolution, "Cells per unit length");
    sub->add_option("--tol", fl.tol, "Solver tolerance");
    sub->add_option("--seed", fl.seed, "Seed for random test fields");
    sub->add_option("--p", fl.p, "Exponent");
  };
  CLI::App* solve = app.add_subcommand("solve", "Solve the primal problem");
  CLI::App* dual = app.add_subcommand("dual", "Solve the dual problem and report the gap");
  CLI::App* gamma = app.add_subcommand("gamma", "Run a limit experiment");
  CLI::App* cap = app.add_subcommand("capacity", "Estimate a capacity over resolutions");
  CLI::App* haus = app.add_subcommand("hausdorff", "Hausdorff distance of two crack sets");
  for (CLI::App* s : {solve, dual, gamma, cap}) common(s, true);
  common(haus, false);
  haus->add_option("sets", fl.sets, "Two set files")->expected(2)->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*solve) return cmd_solve(fl, out);
    if (*dual) return cmd_dual(fl, out);
    if (*gamma) return cmd_gamma(fl, out);
    if (*cap) return cmd_capacity(fl, out);
    return cmd_hausdorff(fl, out);
  } catch (const ConfigError& e) {
    err << "error: " << (fl.source.empty() ? std::string("config") : fl.source);
    if (e.line() > 0) err << ':' << e.line();
    err << ": " << e.what() << '\n';
    return config_error;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return numeric_failure;
  }
}

}  // namespace crackdual::cli
