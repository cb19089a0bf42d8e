#include "crackdual/dual.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "crackdual/errors.hpp"

namespace crackdual {

GradientField rotated(const GradientField& g) {
  GradientField r;
  r.gx.resize(g.size());
  r.gy.resize(g.size());
  for (std::size_t t = 0; t < g.size(); ++t) {
    r.gx[t] = -g.gy[t];
    r.gy[t] = g.gx[t];
  }
  return r;
}

namespace {

// Edge unknowns: one per component, then one per remaining active edge.
std::vector<int> edge_unknowns(const GridMesh& mesh, int& count) {
  const int nc = mesh.partition.count;
  std::vector<int> unknown(mesh.edges.size(), -1);
  count = nc;
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const Edge& ed = mesh.edges[e];
    if (!ed.active) continue;
    unknown[e] = ed.component >= 0 ? ed.component : count++;
  }
  return unknown;
}

ConvexProblem edge_problem(const GridMesh& mesh, double power, const std::vector<double>& meas_cell,
                           const GradientField& eta) {
  ConvexProblem prob;
  prob.n_dofs = mesh.edge_count();
  prob.power = power;
  std::vector<double> area, ex, ey;
  for (std::size_t t = 0; t < mesh.cells.size(); ++t) {
    const Cell& c = mesh.cells[t];
    if (!c.active) continue;
    prob.add_term(c.edge, -2.0 * c.g1x, -2.0 * c.g1y, -2.0 * c.g2x, -2.0 * c.g2y, meas_cell[t]);
    area.push_back(c.area);
    ex.push_back(eta.gx[t]);
    ey.push_back(eta.gy[t]);
  }
  prob.unknown = edge_unknowns(mesh, prob.n_unknowns);
  prob.linear = cell_linear(prob, area, ex, ey);
  return prob;
}

void normalize(const GridMesh& mesh, DualField& f) {
  const double mean = integrate_edge(mesh, f.v) / mesh.total_area();
  for (std::size_t e = 0; e < mesh.edges.size(); ++e)
    if (mesh.edges[e].active) f.v.values[e] -= mean;
  f.component_values.assign(mesh.partition.count, 0.0);
  std::vector<char> seen(mesh.partition.count, 0);
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const int c = mesh.edges[e].component;
    if (c >= 0 && mesh.edges[e].active && !seen[c]) {
      f.component_values[c] = f.v.values[e];
      seen[c] = 1;
    }
  }
  for (int c = 0; c < mesh.partition.count; ++c)
    if (!seen[c]) f.component_values[c] = -mean;
}

}  // namespace

ConvexProblem dual_problem(const GridMesh& mesh, const ConjugateIntegrand& fstar,
                           const ScalarField& g) {
  const GradientField gg = gradient(mesh, g);
  GradientField eta;
  eta.gx.resize(gg.size());
  eta.gy.resize(gg.size());
  std::vector<double> meas(mesh.cells.size(), 0.0);
  for (std::size_t t = 0; t < gg.size(); ++t) {
    // R grad v . grad g = grad v . (g_y, -g_x)
    eta.gx[t] = gg.gy[t];
    eta.gy[t] = -gg.gx[t];
    if (mesh.cells[t].active) meas[t] = mesh.cells[t].area * fstar.coefficient(static_cast<int>(t));
  }
  return edge_problem(mesh, fstar.q(), meas, eta);
}

double dual_value(const GridMesh& mesh, const ConjugateIntegrand& fstar, const DualField& v,
                  const ScalarField& g) {
  if (v.v.size() != mesh.edges.size())
    throw Error(ErrorKind::invalid_dual_field, "dual field length does not match the edge count");
  if (static_cast<int>(v.component_values.size()) != mesh.partition.count)
    throw Error(ErrorKind::invalid_dual_field, "wrong number of component values");
  double vmax = 0;
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const Edge& ed = mesh.edges[e];
    if (!ed.active) continue;
    vmax = std::max(vmax, std::abs(v.v.values[e]));
    if (ed.component >= 0 && v.v.values[e] != v.component_values[ed.component])
      throw Error(ErrorKind::invalid_dual_field,
                  "dual field is not constant on component " + std::to_string(ed.component));
  }
  const double area = mesh.total_area();
  if (std::abs(integrate_edge(mesh, v.v)) > 1e-8 * area * (1.0 + vmax))
    throw Error(ErrorKind::invalid_dual_field, "dual field does not have zero mean");
  const GradientField gv = edge_gradient(mesh, v.v);
  const GradientField gg = gradient(mesh, g);
  double s = 0;
  for (std::size_t t = 0; t < mesh.cells.size(); ++t) {
    const Cell& c = mesh.cells[t];
    if (!c.active) continue;
    const Vec2 z = rotate({gv.gx[t], gv.gy[t]});
    s += c.area * (-fstar.eval(static_cast<int>(t), z) + z[0] * gg.gx[t] + z[1] * gg.gy[t]);
  }
  return s;
}

DualSolution solve_dual(const GridMesh& mesh, const ConjugateIntegrand& fstar,
                        const ScalarField& g, const ComponentPartition& partition, double tol,
                        int max_iter) {
  SolveOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return solve_dual(mesh, fstar, g, partition, opt);
}

DualSolution solve_dual(const GridMesh& mesh, const ConjugateIntegrand& fstar,
                        const ScalarField& g, const ComponentPartition& partition,
                        const SolveOptions& opt) {
  if (partition.count != mesh.partition.count ||
      partition.polyline_component != mesh.partition.polyline_component ||
      partition.arc_component != mesh.partition.arc_component)
    throw Error(ErrorKind::invalid_parameters, "partition does not belong to this mesh");
  if (g.size() != mesh.dofs.size())
    throw Error(ErrorKind::size_mismatch, "boundary data length does not match the DOF count");
  const ConvexProblem prob = dual_problem(mesh, fstar, g);
  DescentOptions dopt;
  dopt.tol = opt.tol > 0 ? opt.tol : default_tolerance(fstar.q());
  dopt.max_iter = opt.max_iter;
  dopt.epsilon_schedule = opt.epsilon_schedule;
  DescentResult r = minimize(prob, std::vector<double>(prob.n_dofs, 0.0), dopt);

  DualSolution sol;
  sol.field.v.values = std::move(r.z);
  normalize(mesh, sol.field);
  sol.report.energy = dual_value(mesh, fstar, sol.field, g);
  sol.report.iterations = r.iterations;
  sol.report.residual = r.residual;
  sol.report.tol = dopt.tol;
  sol.report.converged = r.converged;
  sol.report.epsilon_trace = r.epsilon_trace;
  sol.report.energy_log = r.energy_log;
  sol.report.stage_of_log = r.stage_of_log;
  if (!r.converged && opt.throw_on_failure)
    throw Error(ErrorKind::non_convergence,
                "dual solve did not reach tolerance (residual " + std::to_string(r.residual) + ")");
  return sol;
}

GradientField flux(const GridMesh& mesh, const Integrand& f, const GradientField& grad_u) {
  GradientField s;
  s.gx.assign(grad_u.size(), 0.0);
  s.gy.assign(grad_u.size(), 0.0);
  for (std::size_t t = 0; t < grad_u.size(); ++t) {
    if (!mesh.cells[t].active) continue;
    const Vec2 xi{grad_u.gx[t], grad_u.gy[t]};
    if (xi[0] == 0.0 && xi[1] == 0.0 && f.eps() == 0.0) continue;
    const Vec2 z = f.grad(static_cast<int>(t), xi);
    s.gx[t] = z[0];
    s.gy[t] = z[1];
  }
  return s;
}

DualField conjugate_from_primal(const GridMesh& mesh, const Integrand& f, const ScalarField& u,
                                ConjugateDiagnostics* diag) {
  if (std::any_of(mesh.cells.begin(), mesh.cells.end(), [](const Cell& c) { return !c.active; }))
    throw Error(ErrorKind::unsupported, "domain not simply connected");
  const GradientField sigma = flux(mesh, f, gradient(mesh, u));
  // Target gradient of v: R grad v = sigma  <=>  grad v = (sigma_y, -sigma_x).
  GradientField tau;
  tau.gx.resize(sigma.size());
  tau.gy.resize(sigma.size());
  double tmax = 0;
  for (std::size_t t = 0; t < sigma.size(); ++t) {
    tau.gx[t] = sigma.gy[t];
    tau.gy[t] = -sigma.gx[t];
    tmax = std::max({tmax, std::abs(tau.gx[t]), std::abs(tau.gy[t])});
  }

  // Spanning-tree integration over cells joined by edges; value stored at the centroid.
  const int nc = mesh.cell_count();
  std::vector<std::array<int, 2>> edge_cells(mesh.edges.size(), {-1, -1});
  for (int t = 0; t < nc; ++t)
    for (int e : mesh.cells[t].edge) (edge_cells[e][0] < 0 ? edge_cells[e][0] : edge_cells[e][1]) = t;
  auto centroid = [&](int t) {
    Point c{0, 0};
    for (int n : mesh.cells[t].node) {
      c.x += mesh.node_x(n) / 3.0;
      c.y += mesh.node_y(n) / 3.0;
    }
    return c;
  };
  std::vector<double> value(nc, 0.0);
  std::vector<char> seen(nc, 0), tree_edge(mesh.edges.size(), 0);
  auto at = [&](int t, const Edge& e) {
    const Point c = centroid(t);
    return value[t] + tau.gx[t] * (e.mx - c.x) + tau.gy[t] * (e.my - c.y);
  };
  std::deque<int> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    const int t = queue.front();
    queue.pop_front();
    for (int e : mesh.cells[t].edge) {
      const int o = edge_cells[e][0] == t ? edge_cells[e][1] : edge_cells[e][0];
      if (o < 0 || seen[o]) continue;
      const Edge& ed = mesh.edges[e];
      const Point co = centroid(o);
      value[o] = at(t, ed) - tau.gx[o] * (ed.mx - co.x) - tau.gy[o] * (ed.my - co.y);
      seen[o] = 1;
      tree_edge[e] = 1;
      queue.push_back(o);
    }
  }
  double path_dependence = 0;
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    if (tree_edge[e] || edge_cells[e][1] < 0) continue;
    const Edge& ed = mesh.edges[e];
    path_dependence =
        std::max(path_dependence, std::abs(at(edge_cells[e][0], ed) - at(edge_cells[e][1], ed)));
  }

  const std::vector<double> r = primal_residual(mesh, f, u);
  double r1 = 0;
  for (double x : r) r1 += std::abs(x);
  const Rect o = mesh.cells.empty() ? Rect{} : Rect{mesh.xs.front(), mesh.ys.front(), mesh.xs.back(), mesh.ys.back()};
  const double diam = std::hypot(o.x1 - o.x0, o.y1 - o.y0);
  const double slack = 1e-10 * (tmax * diam + 1.0);
  if (path_dependence > 10.0 * r1 + slack)
    throw Error(ErrorKind::flux_not_conservative,
                "flux integral is path dependent beyond the primal residual");

  // Closest admissible field in L2: the edge problem with p = 2 and target tau.
  std::vector<double> meas(nc, 0.0);
  for (int t = 0; t < nc; ++t) meas[t] = mesh.cells[t].area;
  const ConvexProblem prob = edge_problem(mesh, 2.0, meas, tau);
  DescentOptions dopt;
  dopt.tol = 1e-300;
  dopt.max_iter = 3;
  dopt.epsilon_schedule = {0.0};
  dopt.keep_log = false;
  std::vector<double> z0(prob.n_dofs, 0.0);
  DescentResult res = minimize(prob, z0, dopt);
  DualField out;
  out.v.values = std::move(res.z);
  normalize(mesh, out);

  if (diag) {
    diag->path_dependence = path_dependence;
    diag->residual_l1 = r1;
    // 0.5 r^T L^{-1} r is minus the minimum of 0.5 |grad psi|^2 - r . psi.
    ConvexProblem lap = primal_problem(mesh, Integrand(2.0));
    lap.linear = r;
    DescentResult lr = minimize(lap, std::vector<double>(lap.n_dofs, 0.0), dopt);
    diag->residual_dual_norm = std::sqrt(std::max(0.0, -2.0 * lr.energy));
    const GradientField rv = rotated(edge_gradient(mesh, out.v));
    double s = 0;
    for (int t = 0; t < nc; ++t) {
      const double dx = rv.gx[t] - sigma.gx[t], dy = rv.gy[t] - sigma.gy[t];
      s += mesh.cells[t].area * (dx * dx + dy * dy);
    }
    diag->projection_distance = std::sqrt(s);
  }
  return out;
}

std::vector<double> fenchel_residuals(const GridMesh& mesh, const Integrand& f,
                                      const ConjugateIntegrand& fstar, const ScalarField& u,
                                      const DualField& v) {
  const GradientField gu = gradient(mesh, u);
  const GradientField gv = edge_gradient(mesh, v.v);
  std::vector<double> out(mesh.cells.size(), 0.0);
  for (std::size_t t = 0; t < mesh.cells.size(); ++t) {
    if (!mesh.cells[t].active) continue;
    const int c = static_cast<int>(t);
    const Vec2 xi{gu.gx[t], gu.gy[t]};
    const Vec2 z = rotate({gv.gx[t], gv.gy[t]});
    out[t] = f.eval(c, xi) + fstar.eval(c, z) - (z[0] * xi[0] + z[1] * xi[1]);
  }
  return out;
}

double duality_gap(const GridMesh& mesh, const Integrand& f, const ConjugateIntegrand& fstar,
                   const ScalarField& u, const DualField& v, const ScalarField& g) {
  (void)g;
  const std::vector<double> res = fenchel_residuals(mesh, f, fstar, u, v);
  double s = 0;
  for (std::size_t t = 0; t < res.size(); ++t) s += mesh.cells[t].area * res[t];
  return s;
}

double divergence_pairing(const GridMesh& mesh, const DualField& v, const ScalarField& phi) {
  const GradientField gv = edge_gradient(mesh, v.v);
  const GradientField gp = gradient(mesh, phi);
  double s = 0;
  for (std::size_t t = 0; t < mesh.cells.size(); ++t) {
    if (!mesh.cells[t].active) continue;
    s += mesh.cells[t].area * (-gv.gy[t] * gp.gx[t] + gv.gx[t] * gp.gy[t]);
  }
  return s;
}

}  // namespace crackdual
