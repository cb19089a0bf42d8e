#pragma once

#include <memory>

#include <Eigen/Sparse>

namespace crackdual {

// Sparse Cholesky on the lower triangle of a symmetric positive definite matrix.
// The symbolic analysis is reused across factorizations with the same pattern.
class SpdSolver {
public:
  SpdSolver();
  ~SpdSolver();
  SpdSolver(const SpdSolver&) = delete;
  SpdSolver& operator=(const SpdSolver&) = delete;

  void analyze(const Eigen::SparseMatrix<double>& a);
  bool factorize(const Eigen::SparseMatrix<double>& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  static const char* backend();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace crackdual
