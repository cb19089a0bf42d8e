#include "crackdual/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "crackdual/errors.hpp"

namespace crackdual {

namespace {

std::ofstream open(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::config, "cannot write " + path);
  return os;
}

std::size_t comp_count(const ConvergenceReport& rep) {
  std::size_t n = 0;
  for (const HRow& r : rep.rows) n = std::max(n, r.comp_values.size());
  return n;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void Summary::label(std::string key, std::string value) {
  labels.emplace_back(std::move(key), std::move(value));
}

void Summary::add(std::string key, double value) { values.emplace_back(std::move(key), value); }

void write_summary(const Summary& s, const std::string& report_path, const std::string& csv_path) {
  std::ofstream rep = open(report_path);
  for (const auto& [k, v] : s.labels) rep << k << ": " << v << '\n';
  for (const auto& [k, v] : s.values) rep << k << ": " << format_number(v) << '\n';
  std::ofstream csv = open(csv_path);
  csv << "key,value\n";
  for (const auto& [k, v] : s.values) csv << k << ',' << format_number(v) << '\n';
}

void write_rows_csv(const ConvergenceReport& rep, const std::string& path) {
  std::ofstream os = open(path);
  const std::size_t nc = comp_count(rep);
  os << "h,energy_primal,energy_dual,gap,grad_dist,jump";
  for (std::size_t c = 0; c < nc; ++c) os << ",comp_" << c;
  os << '\n';
  for (const HRow& r : rep.rows) {
    os << r.h << ',' << format_number(r.energy_primal) << ',' << format_number(r.energy_dual)
       << ',' << format_number(r.gap) << ',' << format_number(r.grad_dist) << ','
       << format_number(r.jump);
    for (std::size_t c = 0; c < nc; ++c)
      os << ',' << (c < r.comp_values.size() ? format_number(r.comp_values[c]) : "");
    os << '\n';
  }
}

void write_row_details_csv(const ConvergenceReport& rep, const std::string& path) {
  std::ofstream os = open(path);
  os << "h,a,b,dofs,dual_grad_dist,recovery_overshoot,converged\n";
  for (const HRow& r : rep.rows)
    os << r.h << ',' << format_number(r.a) << ',' << format_number(r.b) << ',' << r.dofs << ','
       << format_number(r.dual_grad_dist) << ',' << format_number(r.recovery_overshoot) << ','
       << (r.converged ? 1 : 0) << '\n';
}

void write_metrics_csv(const ConvergenceReport& rep, const std::string& path) {
  std::ofstream os = open(path);
  os << "name,value\n";
  for (const auto& [k, v] : rep.metrics) os << k << ',' << format_number(v) << '\n';
}

void write_verdicts_csv(const ConvergenceReport& rep, const std::string& path) {
  std::ofstream os = open(path);
  os << "name,value,threshold,pass\n";
  for (const Verdict& v : rep.verdicts)
    os << v.name << ',' << format_number(v.value) << ',' << format_number(v.threshold) << ','
       << (v.pass ? 1 : 0) << '\n';
}

std::string verdict_line(const Verdict& v) {
  return v.name + " = " + format_number(v.value) + " (threshold " + format_number(v.threshold) +
         ") " + (v.pass ? "pass" : "FAIL");
}

void write_convergence_report(const ConvergenceReport& rep, const std::string& path) {
  std::ofstream os = open(path);
  os << "example: " << to_string(rep.example) << '\n';
  os << "experiment: " << to_string(rep.kind) << '\n';
  os << "p: " << format_number(rep.p) << '\n';
  for (const HRow& r : rep.rows) {
    os << "\n[h = " << r.h << "]\n";
    os << "a: " << format_number(r.a) << '\n';
    os << "b: " << format_number(r.b) << '\n';
    os << "dofs: " << r.dofs << '\n';
    os << "energy_primal: " << format_number(r.energy_primal) << '\n';
    os << "energy_dual: " << format_number(r.energy_dual) << '\n';
    os << "gap: " << format_number(r.gap) << '\n';
    os << "grad_dist: " << format_number(r.grad_dist) << '\n';
    os << "dual_grad_dist: " << format_number(r.dual_grad_dist) << '\n';
    os << "jump: " << format_number(r.jump) << '\n';
    os << "recovery_overshoot: " << format_number(r.recovery_overshoot) << '\n';
    os << "converged: " << (r.converged ? 1 : 0) << '\n';
    for (std::size_t c = 0; c < r.comp_values.size(); ++c)
      os << "comp_" << c << ": " << format_number(r.comp_values[c]) << '\n';
  }
  os << "\n[metrics]\n";
  for (const auto& [k, v] : rep.metrics) os << k << ": " << format_number(v) << '\n';
  os << "\n[verdicts]\n";
  for (const Verdict& v : rep.verdicts) os << verdict_line(v) << '\n';
  if (!rep.notes.empty()) {
    os << "\n[notes]\n";
    for (const std::string& n : rep.notes) os << n << '\n';
  }
}

void write_capacity_csv(const std::vector<CapacityRow>& rows, double r, const std::string& path) {
  std::ofstream os = open(path);
  os << "resolution,delta,estimate,iterations,converged,r\n";
  for (const CapacityRow& row : rows)
    os << format_number(row.resolution) << ',' << format_number(row.delta) << ','
       << format_number(row.estimate) << ',' << row.iterations << ','
       << (row.converged ? 1 : 0) << ',' << format_number(r) << '\n';
}

void write_capacity_report(const std::vector<CapacityRow>& rows, double r,
                           const std::string& path) {
  std::ofstream os = open(path);
  os << "r: " << format_number(r) << '\n';
  for (const CapacityRow& row : rows) {
    os << "\n[resolution = " << format_number(row.resolution) << "]\n";
    os << "delta: " << format_number(row.delta) << '\n';
    os << "estimate: " << format_number(row.estimate) << '\n';
    os << "iterations: " << row.iterations << '\n';
    os << "converged: " << (row.converged ? 1 : 0) << '\n';
  }
}

}  // namespace crackdual
