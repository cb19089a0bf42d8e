#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "crackdual/config.hpp"
#include "crackdual/errors.hpp"
#include "crackdual/gamma_lab.hpp"

using namespace crackdual;

namespace {

ProblemSetup setup(const std::string& yaml) { return make_problem(parse_config(yaml)); }

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

double jump_at(const GridMesh& m, const ScalarField& u, Point z) {
  double up = NAN, dn = NAN;
  for (int d : m.dofs_at(z)) {
    if (m.dofs[d].side == Side::plus) up = u.values[d];
    if (m.dofs[d].side == Side::minus) dn = u.values[d];
  }
  return up - dn;
}

}  // namespace

TEST(LimitFunctional, ZeroCouplingIsThePlainSolve) {
  const ProblemSetup s = setup("example: ex5_3\nresolution: 16\np: 3\n");
  const PrimalSolution plain = solve_primal(s.mesh, s.f, s.g);
  const TraceCoupling c = TraceCoupling::power_jump_at(s.mesh, {0, 0}, 0.0, 3);
  const LimitSolution lim = solve_limit_functional(s.mesh, s.f, s.g, c);
  EXPECT_LE(max_abs_diff(lim.u, plain.u), 1e-12);
  EXPECT_EQ(lim.coupling_energy, 0.0);
  EXPECT_NEAR(lim.energy, plain.report.energy, 1e-12);
}

TEST(LimitFunctional, EqualTraceCoefficientsCancel) {
  const ProblemSetup s = setup("example: ex5_7\nresolution: 16\np: 3\n");
  const TraceCoupling c = TraceCoupling::linear_traces_at(s.mesh, {0, 0}, {0.7, 0.7, 0.7});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  ScalarField w;
  for (int d = 0; d < s.mesh.dof_count(); ++d) w.values.push_back(u(rng));
  EXPECT_NEAR(coupling_energy(c, w), 0.0, 1e-15);
  const PrimalSolution plain = solve_primal(s.mesh, s.f, s.g);
  const LimitSolution lim = solve_limit_functional(s.mesh, s.f, s.g, c);
  EXPECT_LE(max_abs_diff(lim.u, plain.u), 1e-8);
}

TEST(LimitFunctional, LinearTracesTelescopeIntoTheRewrittenForm) {
  const ProblemSetup s = setup("example: ex5_7\nresolution: 16\np: 3\n");
  const std::array<double, 3> a{0.3, -0.2, 0.5};
  const TraceCoupling c = TraceCoupling::linear_traces_at(s.mesh, {0, 0}, a);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  ScalarField w;
  for (int d = 0; d < s.mesh.dof_count(); ++d) w.values.push_back(u(rng));
  const double w1 = w.values[c.traces[0]], w2 = w.values[c.traces[1]], w3 = w.values[c.traces[2]];
  const double rewritten = w1 * (a[1] - a[0]) + w2 * (a[2] - a[1]) + w3 * (a[0] - a[2]);
  // The functional subtracts the trace term.
  EXPECT_NEAR(coupling_energy(c, w), -rewritten, 1e-14);
}

TEST(LimitFunctional, OneDimensionalJumpOracle) {
  // (-1,1) x (0,1) cut by x = 0, u = -+1 on the lateral sides, jump penalty c |[u]|^2 per
  // unit crack length. With slope s on each side: E = s^2 + c (2 - 2 s)^2, so s = 4c/(1+4c).
  const double c = 1.0;
  const ProblemSetup s = setup(
      "p: 2\nresolution: 8\ngeometry:\n  domain:\n    outer: [-1, 0, 1, 1]\n"
      "  cracks:\n    - [[0, 0], [0, 1]]\n"
      "  dirichlet: [[[-1, 0], [-1, 1]], [[1, 0], [1, 1]]]\n"
      "boundary_data:\n  linear: [0, 1, 0]\n");
  TraceCoupling tc;
  tc.mode = TraceCoupling::Mode::power_jump;
  tc.power = 2;
  const auto& ys = s.mesh.ys;
  for (const CrackFacePair& fp : s.mesh.crack_face_pairs) {
    const double y = s.mesh.dofs[fp.plus].y;
    const std::size_t j = std::lower_bound(ys.begin(), ys.end(), y) - ys.begin();
    const double lo = j > 0 ? ys[j] - ys[j - 1] : 0.0;
    const double hi = j + 1 < ys.size() ? ys[j + 1] - ys[j] : 0.0;
    tc.pairs.push_back({fp.plus, fp.minus});
    tc.weights.push_back(c * 0.5 * (lo + hi));
  }
  ASSERT_EQ(tc.pairs.size(), ys.size());
  const LimitSolution lim = solve_limit_functional(s.mesh, s.f, s.g, tc);
  const double slope = 4 * c / (1 + 4 * c);
  EXPECT_NEAR(lim.energy, slope * slope + c * std::pow(2 - 2 * slope, 2), 1e-8);
  for (int d = 0; d < s.mesh.dof_count(); ++d) {
    const Dof& dof = s.mesh.dofs[d];
    const bool left = dof.x < 0 || (dof.x == 0 && lim.u.values[d] < 0);
    const double exact = left ? -1 + slope * (dof.x + 1) : 1 - slope * (1 - dof.x);
    ASSERT_NEAR(lim.u.values[d], exact, 1e-8) << dof.x << " " << dof.y;
  }
}

TEST(LimitFunctional, LargeCouplingApproachesTheMergedSolve) {
  const ProblemSetup s = setup("example: ex5_3\nresolution: 16\np: 3\n");
  const Point z{0, 0};
  const LimitSolution merged =
      solve_limit_functional(s.mesh, s.f, s.g, TraceCoupling::power_jump_at(s.mesh, z, INFINITY, 3));
  EXPECT_EQ(jump_at(s.mesh, merged.u, z), 0.0);
  EXPECT_EQ(merged.coupling_energy, 0.0);
  double prev_jump = INFINITY, prev_gap = INFINITY;
  for (double c : {1.0, 10.0, 1e3, 1e5}) {
    const LimitSolution l =
        solve_limit_functional(s.mesh, s.f, s.g, TraceCoupling::power_jump_at(s.mesh, z, c, 3));
    const double jump = std::abs(jump_at(s.mesh, l.u, z));
    const double gap = merged.energy - l.energy;
    EXPECT_LT(jump, prev_jump) << c;
    EXPECT_GE(gap, -1e-8) << c;
    EXPECT_LT(gap, prev_gap) << c;
    prev_jump = jump;
    prev_gap = gap;
  }
  EXPECT_LE(prev_gap, 1e-2 * merged.energy);
}

TEST(LimitFunctional, JumpSignFollowsTheData) {
  // g = y: the upper face sits above the lower one.
  const ProblemSetup s = setup("example: ex5_3\nresolution: 16\np: 3\n");
  const LimitSolution l =
      solve_limit_functional(s.mesh, s.f, s.g, TraceCoupling::power_jump_at(s.mesh, {0, 0}, 0.5, 3));
  EXPECT_GT(jump_at(s.mesh, l.u, {0, 0}), 0.0);
}

TEST(LimitFunctional, MissingContactDofs) {
  const ProblemSetup s = setup("example: ex5_3\nresolution: 16\np: 3\n");
  try {
    TraceCoupling::power_jump_at(s.mesh, {0, 0.5}, 1.0, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::missing_contact);
  }
  EXPECT_THROW(TraceCoupling::linear_traces_at(s.mesh, {0, 0}, {1, 2, 3}), Error);
  EXPECT_THROW(TraceCoupling::power_jump_at(s.mesh, {0, 0}, -1.0, 3), Error);
  TraceCoupling empty;
  empty.mode = TraceCoupling::Mode::power_jump;
  EXPECT_THROW(solve_limit_functional(s.mesh, s.f, s.g, empty), Error);
}

TEST(DiscreteDuality, ZeroCouplingHasNoJumpTerm) {
  const ProblemSetup s = setup("example: ex5_3\nresolution: 16\np: 3\n");
  const PrimalSolution u = solve_primal(s.mesh, s.f, s.g);
  const DualityRelation r = check_discrete_duality(s.mesh, u.u, 0.25, 0.25, 0.0, 3, {0, 0});
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.jump_v, 0.0);
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_THROW(check_discrete_duality(s.mesh, u.u, NAN, 0.0, 0.0, 3, {0, 0}), Error);
}

TEST(DiscreteDuality, HandValues) {
  const ProblemSetup s = setup("example: ex5_3\nresolution: 16\np: 3\n");
  ScalarField u;
  u.values.assign(s.mesh.dof_count(), 0.0);
  for (int d : s.mesh.dofs_at({0, 0}))
    u.values[d] = s.mesh.dofs[d].side == Side::plus ? 0.5 : -0.5;
  // 3 * 0.5 * |1| * 1 = 1.5
  const DualityRelation r = check_discrete_duality(s.mesh, u, -0.75, 0.75, 0.5, 3, {0, 0});
  EXPECT_EQ(r.jump_u, 1.0);
  EXPECT_EQ(r.jump_v, 1.5);
  EXPECT_NEAR(r.lhs, 1.5, 1e-15);
  EXPECT_NEAR(r.relative, 0.0, 1e-15);
}

TEST(ExperimentGrid, ResolutionRuleIsEnforced) {
  ExperimentConfig cfg = default_experiment_config(Example::ex5_3);
  cfg.grid = GridKind::uniform;
  cfg.h_list = {4, 64};
  cfg.resolution = 8;
  try {
    experiment_grid(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resolution);
  }
  // A graded grid places enough lines across the smallest channel.
  cfg.grid = GridKind::graded;
  const GridLines gl = experiment_grid(cfg);
  for (std::size_t k = 0; k < cfg.h_list.size(); ++k) {
    const auto [a, b] = experiment_channel(cfg, k);
    int across = 0;
    for (double x : gl.xs) across += (x > -a / 2 && x < a / 2);
    EXPECT_GE(across + 1, cfg.cells_per_feature);
  }
}

TEST(ExperimentGrid, ChannelCouplingIsHeldConstant) {
  ExperimentConfig cfg = default_experiment_config(Example::ex5_3);
  for (std::size_t k = 0; k < cfg.h_list.size(); ++k) {
    const auto [a, b] = experiment_channel(cfg, k);
    EXPECT_NEAR(a * std::pow(b, 1 - cfg.p) / cfg.p, cfg.family.c, 1e-12);
  }
  cfg.a_list = {0.1, 0.1};
  cfg.b_list = {0.1, 0.1};
  EXPECT_THROW(experiment_channel(cfg, 0), ConfigError);
}

TEST(Experiments, ConstantDataGivesZeroDistances) {
  ExperimentConfig cfg = default_experiment_config(Example::ex5_1);
  cfg.h_list = {2, 4};
  cfg.resolution = 16;
  cfg.grid = GridKind::uniform;
  cfg.g = BoundaryData::linear(2, 0, 0);
  const ConvergenceReport rep = run_experiment(cfg);
  ASSERT_EQ(rep.rows.size(), 2u);
  for (const HRow& r : rep.rows) {
    EXPECT_LE(r.grad_dist, 1e-12);
    EXPECT_LE(std::abs(r.energy_primal), 1e-20);
  }
}

TEST(Experiments, StabilityRunReportsEveryRow) {
  ExperimentConfig cfg = default_experiment_config(Example::ex5_1);
  cfg.h_list = {2, 4, 8};
  cfg.resolution = 32;
  cfg.grid = GridKind::uniform;
  const ConvergenceReport rep = run_experiment(cfg);
  ASSERT_EQ(rep.rows.size(), 3u);
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    EXPECT_TRUE(rep.rows[k].converged);
    EXPECT_LE(std::abs(rep.rows[k].gap), 1e-4 * (1 + rep.rows[k].energy_primal));
    if (k > 0) EXPECT_LT(rep.rows[k].grad_dist, rep.rows[k - 1].grad_dist);
  }
  EXPECT_FALSE(rep.verdicts.empty());
}

TEST(Experiments, JunctionSymmetricDataGivesEqualTraces) {
  ExperimentConfig cfg = default_experiment_config(Example::ex5_7);
  cfg.junction_mode = JunctionMode::symmetric;
  cfg.g = BoundaryData::quadratic(1, 0, -1);
  cfg.h_list = {8, 16};
  cfg.resolution = 16;
  const ConvergenceReport rep = run_experiment(cfg);
  EXPECT_LE(rep.metric("a_spread_relative"), 0.02);
  EXPECT_LE(rep.metric("euler_lagrange_residual"), 1e-3);
  // Equal traces cancel, so the limit problem is the plain cracked solve.
  EXPECT_NEAR(rep.metric("limit_energy"), rep.metric("plain_limit_energy"),
              1e-3 * rep.metric("plain_limit_energy"));
}

TEST(Experiments, WrongExampleForTheExperiment) {
  ExperimentConfig cfg = default_experiment_config(Example::ex5_1);
  cfg.kind = ExperimentKind::jump;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
}
