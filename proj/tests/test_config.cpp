#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "crackdual/config.hpp"
#include "crackdual/errors.hpp"

using namespace crackdual;

namespace {

int error_line(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Config, ExampleDefaults) {
  const RunConfig c = parse_config("example: ex5_3\np: 3\n");
  ASSERT_TRUE(c.geometry.example);
  EXPECT_EQ(*c.geometry.example, Example::ex5_3);
  EXPECT_EQ(*c.p, 3.0);
  EXPECT_EQ(c.gamma.kind, ExperimentKind::jump);
  EXPECT_EQ(c.gamma.p, 3.0);
  EXPECT_EQ(c.resolution, 32);
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(c.dual_method, DualMethod::solve);
}

TEST(Config, ExplicitGeometry) {
  const RunConfig c = parse_config(
      "p: 2.5\nepsilon: 0.01\nresolution: 8\nseed: 9\n"
      "geometry:\n  domain:\n    outer: [0, 0, 2, 1]\n    holes: [[0.5, 0.25, 1, 0.75]]\n"
      "  cracks:\n    - [[1.5, 0], [1.5, 0.5]]\n  dirichlet: all\n"
      "weights:\n  default: 2\n  regions:\n    - {rect: [0, 0, 1, 1], value: 3}\n"
      "boundary_data:\n  polynomial: [1, 2, 3, 4, 5, 6]\n");
  EXPECT_EQ(c.geometry.domain.outer().x1, 2.0);
  EXPECT_EQ(c.geometry.domain.holes().size(), 1u);
  EXPECT_EQ(c.geometry.cracks.polylines().size(), 1u);
  EXPECT_EQ(c.default_weight, 2.0);
  ASSERT_EQ(c.weights.size(), 1u);
  EXPECT_EQ(c.weights[0].value, 3.0);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.g(1, 1), 21.0);
  const ProblemSetup s = make_problem(c);
  EXPECT_EQ(s.f.kind(), IntegrandKind::weighted_p_power);
  EXPECT_EQ(s.f.eps(), 0.01);
}

TEST(Config, GammaAndCapacityBlocks) {
  const RunConfig c = parse_config(
      "example: ex5_1\np: 3\ngamma:\n  h: [2, 4]\n  resolution: 16\n  grid: uniform\n"
      "capacity:\n  set:\n    disk: {center: [0, 0], radius: 0.25}\n"
      "  container:\n    disk: {center: [0, 0], radius: 1}\n  r: 3\n  resolutions: [16, 32]\n");
  EXPECT_TRUE(c.has_gamma);
  EXPECT_EQ(c.gamma.h_list, (std::vector<int>{2, 4}));
  EXPECT_EQ(c.gamma.resolution, 16);
  EXPECT_EQ(c.gamma.grid, GridKind::uniform);
  EXPECT_TRUE(c.has_capacity);
  EXPECT_EQ(c.capacity.r, 3.0);
  EXPECT_EQ(c.capacity.set.kind, CapacitySet::Kind::disk);
  EXPECT_EQ(c.capacity_resolutions, (std::vector<double>{16, 32}));
}

TEST(Config, TopLevelResolutionReachesTheExperiment) {
  EXPECT_EQ(parse_config("example: ex5_1\np: 3\nresolution: 48\n").gamma.resolution, 48);
}

TEST(Config, MissingExponentIsReported) {
  try {
    parse_config("example: ex5_1\nresolution: 16\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'p'"), std::string::npos);
    EXPECT_EQ(e.line(), 1);
  }
}

TEST(Config, ErrorsCarryTheLine) {
  EXPECT_EQ(error_line("p: 3\nexample: ex5_1\nresolutoin: 16\n"), 3);
  EXPECT_EQ(error_line("p: 3\nexample: ex5_9\n"), 2);
  EXPECT_EQ(error_line("example: ex5_1\np: 0.5\n"), 2);
  EXPECT_EQ(error_line("example: ex5_1\np: 3\nresolution: -4\n"), 3);
  EXPECT_EQ(error_line("p: 3\ngeometry:\n  domain:\n    outer: [0, 0, 1]\n"), 4);
  EXPECT_EQ(error_line("p: 3\nexample: ex5_1\ndual:\n  method: guess\n"), 4);
  // Unterminated sequence: reported where the input ends.
  EXPECT_EQ(error_line("p: [3\n"), 2);
}

TEST(Config, UnknownKeysAreRejected) {
  try {
    parse_config("example: ex5_1\np: 3\ngamma:\n  stabel_ratio: 0.5\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("stabel_ratio"), std::string::npos);
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(Config, FilesAndSetFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "crackdual_config_test";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "run.yaml";
  std::ofstream(cfg) << "example: ex5_7\np: 2\n";
  EXPECT_EQ(*load_config(cfg.string()).geometry.example, Example::ex5_7);
  EXPECT_THROW(load_config((dir / "missing.yaml").string()), Error);
  const auto set = dir / "set.yaml";
  std::ofstream(set) << "domain:\n  outer: [-1, -1, 1, 1]\npolylines:\n  - [[-1, 0], [1, 0]]\n";
  const SetFile sf = load_set_file(set.string());
  EXPECT_EQ(sf.set.polylines().size(), 1u);
  ASSERT_TRUE(sf.domain);
  EXPECT_EQ(sf.domain->outer().x0, -1.0);
  std::filesystem::remove_all(dir);
}
