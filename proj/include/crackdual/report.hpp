#pragma once

#include <string>
#include <utility>
#include <vector>

#include "crackdual/capacity.hpp"
#include "crackdual/gamma_lab.hpp"

namespace crackdual {

// Shortest text that reads back to the same double.
std::string format_number(double v);

// Named values of a single run, kept in insertion order.
struct Summary {
  std::vector<std::pair<std::string, std::string>> labels;
  std::vector<std::pair<std::string, double>> values;

  void label(std::string key, std::string value);
  void add(std::string key, double value);
};

// report.txt as `key: value` lines, summary.csv as `key,value`.
void write_summary(const Summary& s, const std::string& report_path, const std::string& csv_path);

// `h,energy_primal,energy_dual,gap,grad_dist,jump,comp_0,...`
void write_rows_csv(const ConvergenceReport& rep, const std::string& path);
// The remaining per-h values: `h,a,b,dofs,dual_grad_dist,recovery_overshoot,converged`.
void write_row_details_csv(const ConvergenceReport& rep, const std::string& path);
void write_metrics_csv(const ConvergenceReport& rep, const std::string& path);
void write_verdicts_csv(const ConvergenceReport& rep, const std::string& path);
// Structured text: header, one section per h, metrics, verdicts, notes.
void write_convergence_report(const ConvergenceReport& rep, const std::string& path);
std::string verdict_line(const Verdict& v);

// `resolution,delta,estimate,iterations,converged,r`
void write_capacity_csv(const std::vector<CapacityRow>& rows, double r, const std::string& path);
void write_capacity_report(const std::vector<CapacityRow>& rows, double r,
                           const std::string& path);

}  // namespace crackdual
