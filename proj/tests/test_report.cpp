#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "crackdual/report.hpp"

using namespace crackdual;

namespace {

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

ConvergenceReport sample_report() {
  ConvergenceReport rep;
  HRow r;
  r.h = 4;
  r.energy_primal = 0.5;
  r.energy_dual = 0.25;
  r.jump = NAN;
  r.comp_values = {1.0, -1.0};
  r.converged = true;
  rep.rows = {r};
  rep.metrics = {{"distance_ratio", 0.1}};
  rep.verdicts = {{"stable", 1, 1, true}};
  rep.notes = {"a note"};
  return rep;
}

}  // namespace

TEST(Report, NumbersRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 2000; ++k) {
    const double v = u(rng) * std::pow(10.0, (k % 40) - 20);
    EXPECT_EQ(std::strtod(format_number(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(format_number(NAN), "nan");
  EXPECT_EQ(format_number(INFINITY), "inf");
}

TEST(Report, VerdictLine) {
  EXPECT_EQ(verdict_line({"ratio", 0.5, 0.75, true}), "ratio = 0.5 (threshold 0.75) pass");
  EXPECT_EQ(verdict_line({"ratio", 0.8, 0.75, false}), "ratio = 0.8 (threshold 0.75) FAIL");
}

TEST(Report, CsvHeaders) {
  const auto dir = std::filesystem::temp_directory_path() / "crackdual_report_test";
  std::filesystem::create_directories(dir);
  const ConvergenceReport rep = sample_report();
  write_rows_csv(rep, (dir / "rows.csv").string());
  auto rows = lines_of(dir / "rows.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "h,energy_primal,energy_dual,gap,grad_dist,jump,comp_0,comp_1");
  EXPECT_EQ(rows[1].substr(0, 12), "4,0.5,0.25,0");
  write_row_details_csv(rep, (dir / "d.csv").string());
  EXPECT_EQ(lines_of(dir / "d.csv")[0], "h,a,b,dofs,dual_grad_dist,recovery_overshoot,converged");
  write_metrics_csv(rep, (dir / "m.csv").string());
  EXPECT_EQ(lines_of(dir / "m.csv"), (std::vector<std::string>{"name,value", "distance_ratio,0.1"}));
  write_verdicts_csv(rep, (dir / "v.csv").string());
  EXPECT_EQ(lines_of(dir / "v.csv")[0], "name,value,threshold,pass");
  write_capacity_csv({{32, 0.05, 4.5, 3, true}}, 2, (dir / "c.csv").string());
  auto cap = lines_of(dir / "c.csv");
  EXPECT_EQ(cap[0], "resolution,delta,estimate,iterations,converged,r");
  EXPECT_EQ(cap[1], "32,0.05,4.5,3,1,2");
  write_convergence_report(rep, (dir / "report.txt").string());
  std::ifstream is(dir / "report.txt");
  std::stringstream ss;
  ss << is.rdbuf();
  for (const char* s : {"[h = 4]", "[metrics]", "[verdicts]", "[notes]", "a note"})
    EXPECT_NE(ss.str().find(s), std::string::npos) << s;
  std::filesystem::remove_all(dir);
}

TEST(Report, SummaryFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "crackdual_summary_test";
  std::filesystem::create_directories(dir);
  Summary s;
  s.label("command", "solve");
  s.add("energy", 0.25);
  write_summary(s, (dir / "report.txt").string(), (dir / "summary.csv").string());
  EXPECT_EQ(lines_of(dir / "report.txt"), (std::vector<std::string>{"command: solve", "energy: 0.25"}));
  const auto csv = lines_of(dir / "summary.csv");
  ASSERT_FALSE(csv.empty());
  EXPECT_EQ(csv.back(), "energy,0.25");
  std::filesystem::remove_all(dir);
}
