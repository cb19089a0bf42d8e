#include "crackdual/descent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <cstdio>
#include <cstdlib>

#include <Eigen/Sparse>

#include "crackdual/errors.hpp"
#include "crackdual/kernels.hpp"
#include "crackdual/spd_solver.hpp"

namespace crackdual {

std::vector<double> default_epsilon_schedule(double power) {
  if (power == 2.0) return {0.0};
  if (std::abs(power - 2.0) > 0.25) return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  return {1e-6};
}

namespace {

double pair_energy(const PairTerm& pt, double d, double eps, double* dE, double* weight) {
  const double t = d * d + eps * eps;
  if (t == 0.0) {
    if (dE) *dE = 0.0;
    if (weight) *weight = (pt.power == 2.0) ? 2.0 * pt.coef : 0.0;
    return 0.0;
  }
  const double te = std::pow(t, 0.5 * (pt.power - 2.0));
  const double w = pt.coef * pt.power * te;
  if (dE) *dE = w * d;
  if (weight) *weight = w;
  return pt.coef * (t * te - std::pow(eps, pt.power));
}

class Engine {
public:
  explicit Engine(const ConvexProblem& p) : P(p) {
    const std::size_t nt = P.term_count();
    gx.resize(nt);
    gy.resize(nt);
    scale.resize(nt);
    pair_weight.resize(P.pairs.size());
    pair_diff.resize(P.pairs.size());
  }

  double energy(const std::vector<double>& z, double eps, std::vector<double>* grad) {
    const std::size_t nt = P.term_count();
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& d = P.tdof[t];
      const double d1 = z[d[1]] - z[d[0]], d2 = z[d[2]] - z[d[0]];
      gx[t] = P.k1x[t] * d1 + P.k2x[t] * d2;
      gy[t] = P.k1y[t] * d1 + P.k2y[t] * d2;
    }
    double e = kernels::power_cells(gx, gy, P.meas, P.power, eps, scale);
    if (grad) grad->assign(P.n_dofs, 0.0);
    if (grad) {
      double* g = grad->data();
      for (std::size_t t = 0; t < nt; ++t) {
        const auto& d = P.tdof[t];
        const double fx = scale[t] * gx[t], fy = scale[t] * gy[t];
        const double a1 = fx * P.k1x[t] + fy * P.k1y[t];
        const double a2 = fx * P.k2x[t] + fy * P.k2y[t];
        g[d[1]] += a1;
        g[d[2]] += a2;
        g[d[0]] -= a1 + a2;
      }
    }
    for (std::size_t k = 0; k < P.pairs.size(); ++k) {
      const PairTerm& pt = P.pairs[k];
      double dE = 0.0;
      pair_diff[k] = z[pt.i] - z[pt.j];
      e += pair_energy(pt, pair_diff[k], eps, &dE, &pair_weight[k]);
      if (grad) {
        (*grad)[pt.i] += dE;
        (*grad)[pt.j] -= dE;
      }
    }
    if (!P.linear.empty()) {
      double l = 0.0;
      for (int i = 0; i < P.n_dofs; ++i) l += P.linear[i] * z[i];
      e -= l;
      if (grad)
        for (int i = 0; i < P.n_dofs; ++i) (*grad)[i] -= P.linear[i];
    }
    return e;
  }

  const ConvexProblem& P;
  std::vector<double> gx, gy, scale, pair_weight, pair_diff;
};

}  // namespace

double problem_energy(const ConvexProblem& prob, const std::vector<double>& z, double eps,
                      std::vector<double>* grad) {
  Engine eng(prob);
  return eng.energy(z, eps, grad);
}

std::vector<double> cell_linear(const ConvexProblem& prob, const std::vector<double>& area,
                                const std::vector<double>& eta_x,
                                const std::vector<double>& eta_y) {
  std::vector<double> l(prob.n_dofs, 0.0);
  for (std::size_t t = 0; t < prob.term_count(); ++t) {
    const auto& d = prob.tdof[t];
    const double a1 = area[t] * (eta_x[t] * prob.k1x[t] + eta_y[t] * prob.k1y[t]);
    const double a2 = area[t] * (eta_x[t] * prob.k2x[t] + eta_y[t] * prob.k2y[t]);
    l[d[1]] += a1;
    l[d[2]] += a2;
    l[d[0]] -= a1 + a2;
  }
  return l;
}

DescentResult minimize(const ConvexProblem& P, std::vector<double> z0, const DescentOptions& opt) {
  if (static_cast<int>(z0.size()) != P.n_dofs || static_cast<int>(P.unknown.size()) != P.n_dofs)
    throw Error(ErrorKind::size_mismatch, "initial vector does not match the problem size");
  Engine eng(P);
  DescentResult res;
  res.z = std::move(z0);
  std::vector<double>& z = res.z;

  // Floating groups of unknowns, pinned at their smallest member.
  const int nu = P.n_unknowns;
  std::vector<int> parent(nu + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  auto node_of = [&](int dof) { return P.unknown[dof] < 0 ? nu : P.unknown[dof]; };
  // The virtual node nu stands for every fixed DOF; keep it the root of its group.
  auto unite_fixed = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a == find(nu)) std::swap(a, b);
    parent[a] = b;
  };
  for (std::size_t t = 0; t < P.term_count(); ++t) {
    if (!(P.meas[t] > 0)) continue;
    const auto& d = P.tdof[t];
    for (int a = 1; a < 3; ++a) {
      const int na = node_of(d[0]), nb = node_of(d[a]);
      if (na == nu || nb == nu) unite_fixed(na, nb);
      else unite(na, nb);
    }
  }
  for (const PairTerm& pt : P.pairs) {
    if (!(pt.coef > 0)) continue;
    const int na = node_of(pt.i), nb = node_of(pt.j);
    if (na == nu || nb == nu) unite_fixed(na, nb);
    else unite(na, nb);
  }
  std::vector<int> sys(nu, -1);
  int ns = 0;
  {
    const int fixed_root = find(nu);
    std::vector<int> pinned_at(nu + 1, -1);
    std::vector<int> group_index(nu + 1, -1);
    for (int u = 0; u < nu; ++u) {
      const int r = find(u);
      if (r == fixed_root) continue;
      if (pinned_at[r] < 0) {
        pinned_at[r] = u;
        group_index[r] = static_cast<int>(res.floating.size());
        res.floating.push_back({});
      }
      res.floating[group_index[r]].push_back(u);
    }
    int k = 0;
    for (int u = 0; u < nu; ++u) {
      const int r = find(u);
      if (r != fixed_root && pinned_at[r] == u) continue;
      sys[u] = k++;
    }
    ns = k;
  }
  std::vector<int> dof_sys(P.n_dofs, -1);
  for (int i = 0; i < P.n_dofs; ++i)
    if (P.unknown[i] >= 0) dof_sys[i] = sys[P.unknown[i]];

  // Sparsity pattern of the linearized operator (lower triangle).
  Eigen::SparseMatrix<double> A(std::max(ns, 0), std::max(ns, 0));
  std::vector<int> term_pos(9 * P.term_count(), -1), pair_pos(4 * P.pairs.size(), -1);
  if (ns > 0) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(6 * P.term_count() + 3 * P.pairs.size() + ns);
    for (int i = 0; i < ns; ++i) trip.emplace_back(i, i, 0.0);
    for (std::size_t t = 0; t < P.term_count(); ++t)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const int ra = dof_sys[P.tdof[t][a]], rb = dof_sys[P.tdof[t][b]];
          if (ra >= 0 && rb >= 0 && ra >= rb) trip.emplace_back(ra, rb, 0.0);
        }
    for (const PairTerm& pt : P.pairs) {
      const int ra = dof_sys[pt.i], rb = dof_sys[pt.j];
      if (ra >= 0) trip.emplace_back(ra, ra, 0.0);
      if (rb >= 0) trip.emplace_back(rb, rb, 0.0);
      if (ra >= 0 && rb >= 0) trip.emplace_back(std::max(ra, rb), std::min(ra, rb), 0.0);
    }
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    auto locate = [&](int row, int col) {
      const int* outer = A.outerIndexPtr();
      const int* inner = A.innerIndexPtr();
      const int* b = inner + outer[col];
      const int* e = inner + outer[col + 1];
      const int* it = std::lower_bound(b, e, row);
      return static_cast<int>(it - inner);
    };
    for (std::size_t t = 0; t < P.term_count(); ++t)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const int ra = dof_sys[P.tdof[t][a]], rb = dof_sys[P.tdof[t][b]];
          if (ra >= 0 && rb >= 0 && ra >= rb) term_pos[9 * t + 3 * a + b] = locate(ra, rb);
        }
    for (std::size_t k = 0; k < P.pairs.size(); ++k) {
      const int ra = dof_sys[P.pairs[k].i], rb = dof_sys[P.pairs[k].j];
      if (ra >= 0) pair_pos[4 * k + 0] = locate(ra, ra);
      if (rb >= 0) pair_pos[4 * k + 1] = locate(rb, rb);
      if (ra >= 0 && rb >= 0) pair_pos[4 * k + 2] = locate(std::max(ra, rb), std::min(ra, rb));
    }
  }

  SpdSolver solver;
  bool analyzed = false;
  const bool linearized = opt.preconditioner == Preconditioner::linearized;
  double eps_now = 0.0;
  auto assemble = [&]() {
    double* val = A.valuePtr();
    std::fill(val, val + A.nonZeros(), 0.0);
    for (std::size_t t = 0; t < P.term_count(); ++t) {
      const double s = eng.scale[t];
      const double xi[2] = {eng.gx[t], eng.gy[t]};
      const double tt = xi[0] * xi[0] + xi[1] * xi[1] + eps_now * eps_now;
      const double aniso = (linearized && tt > 0) ? s * (P.power - 2.0) / tt : 0.0;
      const double c[3][2] = {{-(P.k1x[t] + P.k2x[t]), -(P.k1y[t] + P.k2y[t])},
                              {P.k1x[t], P.k1y[t]},
                              {P.k2x[t], P.k2y[t]}};
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const int pos = term_pos[9 * t + 3 * a + b];
          if (pos >= 0)
            val[pos] += s * (c[a][0] * c[b][0] + c[a][1] * c[b][1]) +
                        aniso * (c[a][0] * xi[0] + c[a][1] * xi[1]) *
                            (c[b][0] * xi[0] + c[b][1] * xi[1]);
        }
    }
    for (std::size_t k = 0; k < P.pairs.size(); ++k) {
      double w = eng.pair_weight[k];
      if (linearized) {
        const PairTerm& pt = P.pairs[k];
        const double dd = eng.pair_diff[k];
        const double tt = dd * dd + eps_now * eps_now;
        if (tt > 0) w *= 1.0 + (pt.power - 2.0) * dd * dd / tt;
      }
      if (pair_pos[4 * k + 0] >= 0) val[pair_pos[4 * k + 0]] += w;
      if (pair_pos[4 * k + 1] >= 0) val[pair_pos[4 * k + 1]] += w;
      if (pair_pos[4 * k + 2] >= 0) val[pair_pos[4 * k + 2]] -= w;
    }
  };
  auto reduce = [&](const std::vector<double>& g, Eigen::VectorXd& r) {
    r.setZero(ns);
    for (int i = 0; i < P.n_dofs; ++i)
      if (dof_sys[i] >= 0) r[dof_sys[i]] += g[i];
  };

  const std::vector<double> schedule =
      opt.epsilon_schedule.empty() ? [&] {
        double worst = P.power;
        for (const PairTerm& pt : P.pairs)
          if (std::abs(pt.power - 2.0) > std::abs(worst - 2.0)) worst = pt.power;
        return default_epsilon_schedule(worst);
      }()
                                   : opt.epsilon_schedule;

  std::vector<double> g, gnew, znew(z.size());
  Eigen::VectorXd r, rnew, d;
  int total = 0;
  for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
    const double eps = schedule[stage];
    eps_now = eps;
    const bool last = stage + 1 == schedule.size();
    const double stage_tol = last ? opt.tol : std::max(opt.tol, 1e-5);
    const int stage_cap = last ? opt.max_iter : std::min(opt.max_iter, 40);
    res.epsilon_trace.push_back(eps);
    double E = eng.energy(z, eps, &g);
    reduce(g, r);
    res.residual = ns > 0 ? r.lpNorm<Eigen::Infinity>() : 0.0;
    if (opt.keep_log) {
      res.energy_log.push_back(E);
      res.stage_of_log.push_back(static_cast<int>(stage));
    }
    int it = 0, flat_steps = 0;
    double alpha_prev = 1.0;
    while (res.residual > stage_tol && it < stage_cap && total < opt.max_iter) {
      assemble();
      if (!analyzed) {
        solver.analyze(A);
        analyzed = true;
      }
      if (!solver.factorize(A)) {
        // Guard against a numerically singular linearization.
        double dmax = 0;
        for (int i = 0; i < ns; ++i) dmax = std::max(dmax, A.coeff(i, i));
        for (int i = 0; i < ns; ++i) A.coeffRef(i, i) += 1e-12 * dmax;
        if (!solver.factorize(A))
          throw Error(ErrorKind::non_convergence, "linearized operator is not positive definite");
      }
      d = solver.solve(-r);
      double phi0 = r.dot(d);
      if (!(phi0 < 0)) {
        d = -r;
        phi0 = r.dot(d);
      }
      auto trial = [&](double alpha, double& Et, double& phit) {
        for (int i = 0; i < P.n_dofs; ++i)
          znew[i] = dof_sys[i] >= 0 ? z[i] + alpha * d[dof_sys[i]] : z[i];
        Et = eng.energy(znew, eps, &gnew);
        reduce(gnew, rnew);
        phit = rnew.dot(d);
      };
      double alpha = linearized ? 1.0 : alpha_prev, Et = 0, phit = 0;
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls) {
        trial(alpha, Et, phit);
        const bool armijo = Et <= E + opt.armijo * alpha * phi0;
        // Below rounding the energy cannot resolve progress; a non-increasing step with
        // non-positive end slope still decreases the convex energy.
        const bool flat = Et <= E && phit <= 0.0;
        if (armijo || flat) {
          accepted = true;
          break;
        }
        double next = 0.5 * alpha;
        if (phit > 0) next = std::clamp(alpha * phi0 / (phi0 - phit), 0.1 * alpha, 0.9 * alpha);
        alpha = next;
      }
      if (!accepted) break;
      // Secant extrapolation while the slope at the accepted point is still steep.
      if (phit < 0.1 * phi0) {
        const double ext = std::min(8.0 * alpha, alpha * phi0 / (phi0 - phit));
        if (ext > 1.05 * alpha) {
          const double Ekeep = Et, phikeep = phit;
          std::vector<double> zkeep = znew, gkeep = gnew;
          Eigen::VectorXd rkeep = rnew;
          double Ee, phie;
          trial(ext, Ee, phie);
          if (Ee <= Ekeep) {
            alpha = ext;
            Et = Ee;
            phit = phie;
          } else {
            znew.swap(zkeep);
            gnew.swap(gkeep);
            rnew = rkeep;
            Et = Ekeep;
            phit = phikeep;
            // Restore the linearization weights of the kept point.
            eng.energy(znew, eps, nullptr);
          }
        }
      }
      alpha_prev = std::clamp(alpha, 0.05, 4.0);
      flat_steps = Et < E ? 0 : flat_steps + 1;
      z.swap(znew);
      g.swap(gnew);
      r = rnew;
      E = Et;
      res.residual = r.lpNorm<Eigen::Infinity>();
      if (opt.keep_log) {
        res.energy_log.push_back(E);
        res.stage_of_log.push_back(static_cast<int>(stage));
      }
      ++it;
      ++total;
      // Energy no longer resolves progress: the residual is at its rounding floor.
      if (flat_steps >= 5) break;
    }
    res.energy = E;
    if (last) res.converged = res.residual <= opt.tol;
  }
  res.iterations = total;
  return res;
}

}  // namespace crackdual
