#include "crackdual/primal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crackdual/errors.hpp"
#include "crackdual/kernels.hpp"

namespace crackdual {

double default_tolerance(double p) { return p == 2.0 ? 1e-8 : 1e-6; }

double energy(const GridMesh& mesh, const Integrand& f, const ScalarField& w) {
  const GradientField g = gradient(mesh, w);
  std::vector<double> meas(mesh.cells.size()), scale(mesh.cells.size());
  for (std::size_t t = 0; t < mesh.cells.size(); ++t)
    meas[t] = mesh.cells[t].active ? mesh.cells[t].area * f.weight(static_cast<int>(t)) : 0.0;
  return kernels::power_cells(g.gx, g.gy, meas, f.p(), f.eps(), scale);
}

ConvexProblem primal_problem(const GridMesh& mesh, const Integrand& f) {
  ConvexProblem prob;
  prob.n_dofs = mesh.dof_count();
  prob.power = f.p();
  for (std::size_t t = 0; t < mesh.cells.size(); ++t) {
    const Cell& c = mesh.cells[t];
    if (!c.active) continue;
    prob.add_term(c.dof, c.g1x, c.g1y, c.g2x, c.g2y, c.area * f.weight(static_cast<int>(t)));
  }
  prob.unknown.assign(prob.n_dofs, -1);
  for (int d = 0; d < prob.n_dofs; ++d)
    if (!mesh.dirichlet[d]) prob.unknown[d] = prob.n_unknowns++;
  return prob;
}

void anchor_floating_parts(const GridMesh& mesh, ScalarField& u) {
  const int n = mesh.dof_count();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const Cell& c : mesh.cells) {
    if (!c.active) continue;
    for (int a = 1; a < 3; ++a) {
      const int r0 = find(c.dof[0]), r1 = find(c.dof[a]);
      if (r0 != r1) parent[std::max(r0, r1)] = std::min(r0, r1);
    }
  }
  std::vector<char> anchored(n, 0);
  for (int d = 0; d < n; ++d)
    if (mesh.dirichlet[d]) anchored[find(d)] = 1;
  std::vector<double> integral(n, 0.0), area(n, 0.0);
  for (const Cell& c : mesh.cells) {
    if (!c.active) continue;
    const int r = find(c.dof[0]);
    if (anchored[r]) continue;
    integral[r] += c.area * (u.values[c.dof[0]] + u.values[c.dof[1]] + u.values[c.dof[2]]) / 3.0;
    area[r] += c.area;
  }
  for (int d = 0; d < n; ++d) {
    const int r = find(d);
    if (!anchored[r] && area[r] > 0) u.values[d] -= integral[r] / area[r];
  }
}

PrimalSolution solve_primal(const GridMesh& mesh, const Integrand& f, const ScalarField& g,
                            double tol, int max_iter) {
  SolveOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return solve_primal(mesh, f, g, opt);
}

PrimalSolution solve_primal(const GridMesh& mesh, const Integrand& f, const ScalarField& g,
                            const SolveOptions& opt) {
  if (g.size() != mesh.dofs.size())
    throw Error(ErrorKind::size_mismatch, "boundary data length does not match the DOF count");
  if (std::none_of(mesh.dirichlet.begin(), mesh.dirichlet.end(), [](char c) { return c != 0; }))
    throw Error(ErrorKind::invalid_parameters, "no Dirichlet DOFs");
  const ConvexProblem prob = primal_problem(mesh, f);
  DescentOptions dopt;
  dopt.tol = opt.tol > 0 ? opt.tol : default_tolerance(f.p());
  dopt.max_iter = opt.max_iter;
  dopt.epsilon_schedule = opt.epsilon_schedule;
  if (dopt.epsilon_schedule.empty() && f.eps() > 0) dopt.epsilon_schedule = {f.eps()};
  DescentResult r = minimize(prob, g.values, dopt);

  PrimalSolution sol;
  sol.u.values = std::move(r.z);
  anchor_floating_parts(mesh, sol.u);
  sol.grad = gradient(mesh, sol.u);
  sol.report.energy = energy(mesh, f, sol.u);
  sol.report.iterations = r.iterations;
  sol.report.residual = r.residual;
  sol.report.tol = dopt.tol;
  sol.report.converged = r.converged;
  sol.report.epsilon_trace = r.epsilon_trace;
  sol.report.energy_log = r.energy_log;
  sol.report.stage_of_log = r.stage_of_log;
  if (!r.converged && opt.throw_on_failure)
    throw Error(ErrorKind::non_convergence,
                "primal solve did not reach tolerance (residual " + std::to_string(r.residual) + ")");
  return sol;
}

std::vector<double> primal_residual(const GridMesh& mesh, const Integrand& f,
                                    const ScalarField& u) {
  const ConvexProblem prob = primal_problem(mesh, f);
  std::vector<double> grad;
  problem_energy(prob, u.values, f.eps(), &grad);
  for (int d = 0; d < mesh.dof_count(); ++d)
    if (mesh.dirichlet[d]) grad[d] = 0.0;
  return grad;
}

StrongConvergenceReport strong_convergence_check(const GridMesh& mesh, const Integrand& f,
                                                 const std::vector<GradientField>& fields,
                                                 const GradientField& limit,
                                                 const std::vector<double>& energies,
                                                 double energy_tol, double distance_tol) {
  if (fields.size() != energies.size())
    throw Error(ErrorKind::size_mismatch, "fields and energies differ in length");
  StrongConvergenceReport rep;
  {
    std::vector<double> meas(mesh.cells.size()), scale(mesh.cells.size());
    for (std::size_t t = 0; t < mesh.cells.size(); ++t)
      meas[t] = mesh.cells[t].active ? mesh.cells[t].area * f.weight(static_cast<int>(t)) : 0.0;
    rep.limit_energy = kernels::power_cells(limit.gx, limit.gy, meas, f.p(), f.eps(), scale);
  }
  for (std::size_t k = 0; k < fields.size(); ++k) {
    rep.distances.push_back(lp_distance(mesh, fields[k], limit, f.p()));
    rep.energy_gaps.push_back(std::abs(energies[k] - rep.limit_energy));
  }
  if (fields.empty()) return rep;
  const double scale = 1.0 + std::abs(rep.limit_energy);
  rep.energies_converge = rep.energy_gaps.back() <= energy_tol * scale;
  rep.distances_decrease = true;
  for (std::size_t k = 1; k < rep.distances.size(); ++k)
    if (rep.distances[k] > rep.distances[k - 1] * (1 + 1e-12) + 1e-300)
      rep.distances_decrease = false;
  rep.converges = rep.energies_converge && rep.distances.back() <= distance_tol;
  rep.flagged_nonconvergence = !rep.energies_converge;
  return rep;
}

}  // namespace crackdual
