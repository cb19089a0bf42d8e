#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crackdual/capacity.hpp"
#include "crackdual/gamma_lab.hpp"
#include "crackdual/geometry.hpp"
#include "crackdual/integrand.hpp"
#include "crackdual/mesh.hpp"

namespace crackdual {

enum class DualMethod { solve, conjugate };

// Problem geometry: a member of an example family or an explicit description.
struct GeometryConfig {
  std::optional<Example> example;
  // Family member; unset selects the limit set K.
  std::optional<int> h;
  FamilyParams family;
  GridKind grid = GridKind::uniform;
  double cells_per_feature = 4;
  double grading = 1.25;
  Domain domain{Rect{0, 0, 1, 1}};
  CrackSet cracks;
  BoundarySpec boundary;
};

struct RunConfig {
  std::string path;
  GeometryConfig geometry;
  std::optional<double> p;
  double epsilon = 0;
  double default_weight = 1;
  std::vector<WeightRegion> weights;
  BoundaryData g;
  double resolution = 32;
  double tol = 0;
  int max_iter = 500;
  std::uint64_t seed = 0;
  DualMethod dual_method = DualMethod::solve;
  // Filled from the example defaults, then from the gamma block.
  ExperimentConfig gamma;
  bool has_gamma = false;
  CapacityQuery capacity;
  std::vector<double> capacity_resolutions;
  bool has_capacity = false;
};

// Throws ConfigError with the line of the offending entry.
RunConfig parse_config(const std::string& text, const std::string& path = "<config>");
RunConfig load_config(const std::string& path);

// Crack set file for the hausdorff command: `polylines` and an optional `domain`.
struct SetFile {
  CrackSet set;
  std::optional<Domain> domain;
};
SetFile load_set_file(const std::string& path);

// Mesh, boundary data and integrand of a solve or dual run.
struct ProblemSetup {
  Domain domain;
  CrackSet cracks;
  BoundarySpec boundary;
  GridMesh mesh;
  ScalarField g;
  Integrand f;
};

ProblemSetup make_problem(const RunConfig& cfg);

}  // namespace crackdual
