#pragma once

#include <array>
#include <vector>

namespace crackdual {

// Energy over a vector z of DOF values:
//   sum_t meas_t phi(|xi_t|) + sum_k c_k ((d_k^2 + eps^2)^{s_k/2} - eps^{s_k}) - linear . z
// with phi(s) = ((s^2 + eps^2)^{p/2} - eps^p) / p, xi_t = k1_t (z1 - z0) + k2_t (z2 - z0)
// and d_k = z_i - z_j. DOFs map to unknowns (several DOFs may share one) or are fixed.
struct PairTerm {
  int i = -1, j = -1;
  double coef = 0;
  double power = 2;
};

struct ConvexProblem {
  int n_dofs = 0;
  std::vector<std::array<int, 3>> tdof;
  std::vector<double> k1x, k1y, k2x, k2y, meas;
  double power = 2;
  std::vector<PairTerm> pairs;
  std::vector<double> linear;  // empty or n_dofs
  std::vector<int> unknown;    // per DOF: unknown index or -1 for fixed
  int n_unknowns = 0;

  void add_term(std::array<int, 3> d, double k1x_, double k1y_, double k2x_, double k2y_,
                double m) {
    tdof.push_back(d);
    k1x.push_back(k1x_);
    k1y.push_back(k1y_);
    k2x.push_back(k2x_);
    k2y.push_back(k2y_);
    meas.push_back(m);
  }
  std::size_t term_count() const { return tdof.size(); }
};

enum class Preconditioner {
  // Weighted Laplacian with the isotropic secant weight |xi|^{p-2}.
  kacanov,
  // Full linearization: weight |xi|^{p-2} (I + (p-2) xi xi^T / |xi|^2).
  linearized,
};

struct DescentOptions {
  Preconditioner preconditioner = Preconditioner::linearized;
  double tol = 1e-8;
  int max_iter = 500;
  // Empty: chosen from the exponent.
  std::vector<double> epsilon_schedule;
  double armijo = 1e-4;
  bool keep_log = true;
};

struct DescentResult {
  std::vector<double> z;
  double energy = 0;      // at the last regularization
  double residual = 0;    // infinity norm of the reduced gradient
  int iterations = 0;
  bool converged = false;
  std::vector<double> epsilon_trace;
  std::vector<double> energy_log;  // energy after every accepted step, per stage
  std::vector<int> stage_of_log;
  // Unknowns of components without a fixed DOF; each group was pinned at one unknown.
  std::vector<std::vector<int>> floating;
};

std::vector<double> default_epsilon_schedule(double power);

DescentResult minimize(const ConvexProblem& prob, std::vector<double> z0,
                       const DescentOptions& opt);

// Energy and full gradient (length n_dofs) at z for the given regularization.
double problem_energy(const ConvexProblem& prob, const std::vector<double>& z, double eps,
                      std::vector<double>* grad = nullptr);

// Linear term equivalent to sum_t area_t xi_t . eta_t.
std::vector<double> cell_linear(const ConvexProblem& prob, const std::vector<double>& area,
                                const std::vector<double>& eta_x,
                                const std::vector<double>& eta_y);

}  // namespace crackdual
