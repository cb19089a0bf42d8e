#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "crackdual/descent.hpp"
#include "crackdual/mesh.hpp"

namespace crackdual::oracle {

// Minimizer of the quadratic problem (power 2, no pairs, eps = 0) by one sparse LU
// solve on the unknowns. Unknowns not reached by any fixed DOF must be pinned by
// the caller through `pin` (value 0).
inline std::vector<double> direct_quadratic(const ConvexProblem& prob, std::vector<double> z,
                                            const std::vector<int>& pin = {}) {
  const int n = prob.n_unknowns;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int d = 0; d < prob.n_dofs; ++d)
    if (!prob.linear.empty() && prob.unknown[d] >= 0) rhs[prob.unknown[d]] += prob.linear[d];
  for (std::size_t t = 0; t < prob.term_count(); ++t) {
    // xi = sum_a c_a z_a with c_0 = -(k1 + k2), c_1 = k1, c_2 = k2.
    const double cx[3] = {-(prob.k1x[t] + prob.k2x[t]), prob.k1x[t], prob.k2x[t]};
    const double cy[3] = {-(prob.k1y[t] + prob.k2y[t]), prob.k1y[t], prob.k2y[t]};
    for (int a = 0; a < 3; ++a) {
      const int ua = prob.unknown[prob.tdof[t][a]];
      if (ua < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const double kab = prob.meas[t] * (cx[a] * cx[b] + cy[a] * cy[b]);
        const int ub = prob.unknown[prob.tdof[t][b]];
        if (ub >= 0)
          trip.emplace_back(ua, ub, kab);
        else
          rhs[ua] -= kab * z[prob.tdof[t][b]];
      }
    }
  }
  for (int u : pin) {
    trip.emplace_back(u, u, 1e30);
    rhs[u] = 0;
  }
  Eigen::SparseMatrix<double> k(n, n);
  k.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(k);
  const Eigen::VectorXd x = lu.solve(rhs);
  for (int d = 0; d < prob.n_dofs; ++d)
    if (prob.unknown[d] >= 0) z[d] = x[prob.unknown[d]];
  return z;
}

inline double relative_gradient_error(const GridMesh& mesh, const GradientField& a,
                                      const GradientField& b) {
  double num = 0, den = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (!mesh.cells[t].active) continue;
    const double dx = a.gx[t] - b.gx[t], dy = a.gy[t] - b.gy[t];
    num += mesh.cells[t].area * (dx * dx + dy * dy);
    den += mesh.cells[t].area * (b.gx[t] * b.gx[t] + b.gy[t] * b.gy[t]);
  }
  // Absolute when the reference gradient is zero to round-off.
  return den > 1e-24 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace crackdual::oracle
