#pragma once

#include <vector>

#include "crackdual/integrand.hpp"
#include "crackdual/mesh.hpp"
#include "crackdual/primal.hpp"

namespace crackdual {

// v lives on the edge midpoints of the uncracked mesh.
struct DualField {
  ScalarField v;
  std::vector<double> component_values;
};

// R(y1, y2) = (-y2, y1)
inline Vec2 rotate(Vec2 y) { return {-y[1], y[0]}; }
GradientField rotated(const GradientField& g);

// Edge unknowns with every edge of one component sharing a single unknown.
ConvexProblem dual_problem(const GridMesh& mesh, const ConjugateIntegrand& fstar,
                           const ScalarField& g);

double dual_value(const GridMesh& mesh, const ConjugateIntegrand& fstar, const DualField& v,
                  const ScalarField& g);

struct DualSolution {
  DualField field;
  SolveReport report;
};

DualSolution solve_dual(const GridMesh& mesh, const ConjugateIntegrand& fstar,
                        const ScalarField& g, const ComponentPartition& partition,
                        double tol = 0, int max_iter = 500);
DualSolution solve_dual(const GridMesh& mesh, const ConjugateIntegrand& fstar,
                        const ScalarField& g, const ComponentPartition& partition,
                        const SolveOptions& opt);

struct ConjugateDiagnostics {
  double path_dependence = 0;     // largest mismatch on non-tree edges
  double residual_l1 = 0;         // l1 norm of the primal residual
  double residual_dual_norm = 0;  // sqrt(r^T L^{-1} r), L the P1 stiffness
  double projection_distance = 0; // L2 distance between R grad v and the flux
};

// Flux of f at grad u, per cell.
GradientField flux(const GridMesh& mesh, const Integrand& f, const GradientField& grad_u);

DualField conjugate_from_primal(const GridMesh& mesh, const Integrand& f, const ScalarField& u,
                                ConjugateDiagnostics* diag = nullptr);

double duality_gap(const GridMesh& mesh, const Integrand& f, const ConjugateIntegrand& fstar,
                   const ScalarField& u, const DualField& v, const ScalarField& g);

// f(grad u) + f*(R grad v) - R grad v . grad u per cell (zero on inactive cells).
std::vector<double> fenchel_residuals(const GridMesh& mesh, const Integrand& f,
                                      const ConjugateIntegrand& fstar, const ScalarField& u,
                                      const DualField& v);

// sum area (R grad v) . grad phi for a nodal test field phi.
double divergence_pairing(const GridMesh& mesh, const DualField& v, const ScalarField& phi);

}  // namespace crackdual
