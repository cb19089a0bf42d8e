#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;
using crackdual::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("crackdual_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string out(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }
  static int line_count(const std::string& path) {
    std::ifstream is(path);
    int n = 0;
    for (std::string l; std::getline(is, l);) ++n;
    return n;
  }

  fs::path dir_;
};

const char* kAffine =
    "geometry:\n  domain: {outer: [0, 0, 1, 1]}\n  dirichlet:\n    - [[0, 0], [0, 1]]\n"
    "    - [[1, 0], [1, 1]]\np: 3\nboundary_data: {linear: [0, 1, 0]}\nresolution: 8\n";

}  // namespace

TEST_F(CliTest, SolveWritesFieldAndReport) {
  const auto cfg = write("a.yaml", kAffine);
  const Result r = call({"solve", "--config", cfg, "--out", out("run")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("energy 0.33333333333333"), std::string::npos) << r.out;
  EXPECT_EQ(line_count(out("run/u.csv")), 81 + 1);
  EXPECT_NE(slurp(out("run/report.txt")).find("energy: "), std::string::npos);
  EXPECT_TRUE(fs::exists(out("run/summary.csv")));
}

TEST_F(CliTest, ResolutionOverride) {
  const auto cfg = write("a.yaml", kAffine);
  ASSERT_EQ(call({"solve", "--config", cfg, "--out", out("r"), "--resolution", "4"}).code, 0);
  EXPECT_EQ(line_count(out("r/u.csv")), 25 + 1);
}

TEST_F(CliTest, OutputIsDeterministic) {
  const auto cfg = write("c.yaml",
                         "example: ex5_7\nh: 8\nresolution: 16\np: 3\nseed: 5\n");
  ASSERT_EQ(call({"solve", "--config", cfg, "--out", out("one")}).code, 0);
  ASSERT_EQ(call({"solve", "--config", cfg, "--out", out("two")}).code, 0);
  EXPECT_EQ(slurp(out("one/u.csv")), slurp(out("two/u.csv")));
  EXPECT_EQ(slurp(out("one/summary.csv")), slurp(out("two/summary.csv")));
}

TEST_F(CliTest, DualPrintsGapAndComponents) {
  const auto cfg = write("a.yaml", kAffine);
  const Result r = call({"dual", "--config", cfg, "--out", out("d")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("gap "), std::string::npos);
  EXPECT_NE(r.out.find("component 0"), std::string::npos);
  EXPECT_NE(slurp(out("d/components.csv")).find("component,value"), std::string::npos);
  EXPECT_TRUE(fs::exists(out("d/v.csv")));
}

TEST_F(CliTest, ConjugateOnAnnulusIsRefused) {
  const auto cfg = write("ann.yaml", "example: ex5_5\nresolution: 8\np: 2\ndual: {method: conjugate}\n");
  const Result r = call({"dual", "--config", cfg, "--out", out("d")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("not simply connected"), std::string::npos) << r.err;
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  const auto nop = write("nop.yaml", "example: ex5_1\nresolution: 16\n");
  Result r = call({"solve", "--config", nop});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nop.yaml:1: missing required key 'p'"), std::string::npos) << r.err;
  const auto typo = write("typo.yaml", "example: ex5_1\np: 3\nresolutoin: 16\n");
  r = call({"solve", "--config", typo});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("typo.yaml:3:"), std::string::npos) << r.err;
  EXPECT_EQ(call({"solve", "--config", out("absent.yaml")}).code, 2);
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
  EXPECT_EQ(call({"solve"}).code, 2);
  EXPECT_EQ(call({"solve", "--config", nop, "--tol", "abc"}).code, 2);
  EXPECT_EQ(call({"--help"}).code, 0);
}

TEST_F(CliTest, NonConvergenceExitsThree) {
  const auto cfg = write("n.yaml", "example: ex5_7\nh: 8\nresolution: 16\np: 4\nmax_iter: 1\n");
  EXPECT_EQ(call({"solve", "--config", cfg, "--out", out("n")}).code, 3);
}

TEST_F(CliTest, Hausdorff) {
  const auto a = write("a.yaml", "domain: {outer: [-1, -1, 1, 1]}\npolylines:\n  - [[-1, 0], [1, 0]]\n");
  const auto b = write("b.yaml", "polylines:\n  - [[-1, 0], [-0.25, 0]]\n  - [[0.25, 0], [1, 0]]\n");
  Result r = call({"hausdorff", a, a});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0\n");
  r = call({"hausdorff", a, b});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0.25\n");
  EXPECT_EQ(call({"hausdorff", a}).code, 2);
}

TEST_F(CliTest, CapacityTable) {
  const auto cfg = write("cap.yaml",
                         "capacity:\n  set:\n    disk: {center: [0, 0], radius: 0.25}\n"
                         "  container:\n    disk: {center: [0, 0], radius: 1}\n  r: 2\n"
                         "  resolutions: [16, 32]\n");
  const Result r = call({"capacity", "--config", cfg, "--out", out("cap")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("resolution,delta,estimate\n", 0), 0u);
  EXPECT_EQ(line_count(out("cap/capacity.csv")), 3);
}

TEST_F(CliTest, GammaWritesTheConvergenceFiles) {
  const auto cfg = write("g.yaml",
                         "example: ex5_3\np: 3\ngamma:\n  h: [4, 8]\n  resolution: 16\n");
  const Result r = call({"gamma", "--config", cfg, "--out", out("g")});
  ASSERT_NE(r.code, 2) << r.err;
  EXPECT_NE(r.out.find("jump_relation_residual"), std::string::npos) << r.out;
  for (const char* f : {"report.txt", "rows.csv", "rows_detail.csv", "metrics.csv", "verdicts.csv",
                        "limit_u.csv"})
    EXPECT_TRUE(fs::exists(out("g") + "/" + f)) << f;
  EXPECT_EQ(line_count(out("g/rows.csv")), 3);
}
