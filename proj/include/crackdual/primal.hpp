#pragma once

#include <vector>

#include "crackdual/descent.hpp"
#include "crackdual/integrand.hpp"
#include "crackdual/mesh.hpp"

namespace crackdual {

struct SolveReport {
  double energy = 0;
  int iterations = 0;
  double residual = 0;
  double tol = 0;
  bool converged = false;
  std::vector<double> epsilon_trace;
  std::vector<double> energy_log;
  std::vector<int> stage_of_log;
};

struct SolveOptions {
  double tol = 0;  // 0: 1e-8 for p = 2, 1e-6 otherwise
  int max_iter = 500;
  std::vector<double> epsilon_schedule;
  bool throw_on_failure = true;
};

double default_tolerance(double p);

double energy(const GridMesh& mesh, const Integrand& f, const ScalarField& w);

// Discrete problem over nodal DOFs with Dirichlet DOFs fixed.
ConvexProblem primal_problem(const GridMesh& mesh, const Integrand& f);

struct PrimalSolution {
  ScalarField u;
  GradientField grad;
  SolveReport report;
};

PrimalSolution solve_primal(const GridMesh& mesh, const Integrand& f, const ScalarField& g,
                            double tol = 0, int max_iter = 500);
PrimalSolution solve_primal(const GridMesh& mesh, const Integrand& f, const ScalarField& g,
                            const SolveOptions& opt);

// Gradient of the energy of f at u with respect to the DOF values; zero on Dirichlet DOFs.
std::vector<double> primal_residual(const GridMesh& mesh, const Integrand& f,
                                    const ScalarField& u);

// Shift every connected part of the mesh without Dirichlet DOFs to zero mean.
void anchor_floating_parts(const GridMesh& mesh, ScalarField& u);

struct StrongConvergenceReport {
  double limit_energy = 0;
  std::vector<double> distances;
  std::vector<double> energy_gaps;
  bool energies_converge = false;
  bool distances_decrease = false;
  bool converges = false;
  bool flagged_nonconvergence = false;
};

StrongConvergenceReport strong_convergence_check(const GridMesh& mesh, const Integrand& f,
                                                 const std::vector<GradientField>& fields,
                                                 const GradientField& limit,
                                                 const std::vector<double>& energies,
                                                 double energy_tol = 1e-3,
                                                 double distance_tol = 1e-2);

}  // namespace crackdual
