#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crackdual/dual.hpp"
#include "crackdual/geometry.hpp"
#include "crackdual/integrand.hpp"
#include "crackdual/mesh.hpp"
#include "crackdual/primal.hpp"

namespace crackdual {

// Dirichlet data g, evaluated at every DOF (the values off the Dirichlet part are only
// the initial guess).
struct BoundaryData {
  enum class Kind { polynomial, annulus };
  Kind kind = Kind::polynomial;
  // c0 + cx x + cy y + cxx x^2 + cxy x y + cyy y^2
  std::array<double, 6> coef{0, 0, 1, 0, 0, 0};
  // Annulus data: value `inner` where max(|x|,|y|) <= r_inner, `outer` where it is >= r_outer,
  // linear in between.
  double inner = 0, outer = 1;
  double r_inner = 1, r_outer = 2;

  double operator()(double x, double y) const;
  static BoundaryData linear(double c0, double cx, double cy);
  static BoundaryData quadratic(double cxx, double cxy, double cyy);
  static BoundaryData annulus(double inner, double outer, double r_inner, double r_outer);
};

// Data the examples are run with unless configured otherwise.
BoundaryData default_boundary_data(Example e);

enum class ExperimentKind { stability, jump, annulus, junction };
enum class JunctionMode { measured, symmetric };
enum class GridKind { uniform, graded };

ExperimentKind default_experiment(Example e);
std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& s);

struct ExperimentConfig {
  Example example = Example::ex5_1;
  ExperimentKind kind = ExperimentKind::stability;
  double p = 3;
  std::vector<int> h_list{2, 4, 8, 16};
  FamilyParams family;
  // Explicit channel widths and heights per h (ex5_3, ex5_5); empty: from family.c.
  std::vector<double> a_list, b_list;
  // Cells per unit length away from the features.
  double resolution = 32;
  GridKind grid = GridKind::graded;
  // Cells across the smallest feature min(a_h, b_h, 1/h).
  double cells_per_feature = 4;
  double grading = 1.25;
  BoundaryData g;
  JunctionMode junction_mode = JunctionMode::measured;
  double tol = 0;
  int max_iter = 500;
  std::uint64_t seed = 0;
  int test_fields = 20;
  int threads = 0;  // 0: hardware concurrency
  // Stable verdict: final distance at most this fraction of the first.
  double stable_ratio = 0.75;
};

// Config with the example defaults filled in.
ExperimentConfig default_experiment_config(Example e);

struct HRow {
  int h = 0;
  double a = 0, b = 0;
  int dofs = 0;
  double energy_primal = 0;
  double energy_dual = 0;
  double gap = 0;
  double grad_dist = 0;       // L^p distance of grad u_h to the limit gradient
  double dual_grad_dist = 0;  // L^q distance of grad v_h to the limit dual gradient (stable runs)
  double jump = 0;            // jump proxy across the contact, NaN when undefined
  double recovery_overshoot = 0;  // F_h(recovery) - min F_inf (ex5_3), NaN otherwise
  std::vector<double> comp_values;
  bool converged = false;
};

struct Verdict {
  std::string name;
  double value = 0;
  double threshold = 0;
  bool pass = false;
};

struct ConvergenceReport {
  Example example = Example::ex5_1;
  ExperimentKind kind = ExperimentKind::stability;
  double p = 3;
  std::vector<HRow> rows;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
  // Fields on the common grid, kept for inspection and output.
  GridMesh limit_mesh;
  ScalarField limit_u;

  double metric(const std::string& name) const;
  const Verdict* verdict(const std::string& name) const;
  bool passed() const;
};

struct TraceCoupling {
  enum class Mode { none, power_jump, linear_traces };
  Mode mode = Mode::none;
  double power = 2;
  // power_jump: sum_k weight_k |z_i - z_j|^power; an infinite weight merges the pair.
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> weights;
  // linear_traces: -[a1 (w3 - w1) + a2 (w1 - w2) + a3 (w2 - w3)] on the DOFs w1, w2, w3.
  std::array<int, 3> traces{-1, -1, -1};
  std::array<double, 3> a{0, 0, 0};

  // Pair of the two DOFs at z with weight c.
  static TraceCoupling power_jump_at(const GridMesh& mesh, Point z, double c, double p);
  // The three junction DOFs at z in counterclockwise sector order.
  static TraceCoupling linear_traces_at(const GridMesh& mesh, Point z, std::array<double, 3> a);
};

struct LimitSolution {
  ScalarField u;
  GradientField grad;
  double energy = 0;           // bulk energy plus coupling term
  double coupling_energy = 0;  // the coupling term alone
  SolveReport report;
};

// Coupling term at u (0 for merged pairs).
double coupling_energy(const TraceCoupling& coupling, const ScalarField& u);

LimitSolution solve_limit_functional(const GridMesh& mesh, const Integrand& f,
                                     const ScalarField& g, const TraceCoupling& coupling,
                                     const SolveOptions& opt = {});

struct DualityRelation {
  double jump_u = 0;  // u+ - u- at the contact
  double jump_v = 0;  // difference of the dual component values across the junction
  double lhs = 0;     // p c |[u]|^{p-2} [u]
  double residual = 0;
  double relative = 0;
};

// [v] = v_right - v_left, the flux through the contact from the minus to the plus side.
DualityRelation check_discrete_duality(const GridMesh& mesh, const ScalarField& u_limit,
                                       double v_left, double v_right, double c, double p,
                                       Point contact);

// Grid shared by every K_h of the experiment and by the limit set.
GridLines experiment_grid(const ExperimentConfig& cfg);
// Channel (a_h, b_h) of ex5_3 / ex5_5 at list position k.
std::pair<double, double> experiment_channel(const ExperimentConfig& cfg, std::size_t k);
CrackSet experiment_cracks(const ExperimentConfig& cfg, std::size_t k);

// Reflection and cutoff construction on K_h from a field on the limit mesh (ex5_3 geometry;
// both meshes on the same grid).
ScalarField recovery_field(const GridMesh& mesh_h, const GridMesh& limit_mesh,
                           const ScalarField& u_limit, double a, double b, Point z);

// Average of u(x, z.y + b/2) - u(x, z.y - b/2) over |x - z.x| <= a/2.
double channel_jump(const GridMesh& mesh, const ScalarField& u, double a, double b, Point z);

// Dual component values ordered by component id.
std::vector<double> component_values(const DualField& v);

ConvergenceReport run_stability_experiment(const ExperimentConfig& cfg);
ConvergenceReport run_jump_experiment(const ExperimentConfig& cfg);
ConvergenceReport run_annulus_experiment(const ExperimentConfig& cfg);
ConvergenceReport run_junction_experiment(const ExperimentConfig& cfg);
ConvergenceReport run_experiment(const ExperimentConfig& cfg);

}  // namespace crackdual
