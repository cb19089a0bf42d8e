#include "crackdual/spd_solver.hpp"

#if defined(CRACKDUAL_HAVE_CHOLMOD)
#include <Eigen/CholmodSupport>
#else
#include <Eigen/SparseCholesky>
#endif

namespace crackdual {

struct SpdSolver::Impl {
#if defined(CRACKDUAL_HAVE_CHOLMOD)
  Eigen::CholmodSimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower> llt;
#else
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower> llt;
#endif
};

SpdSolver::SpdSolver() : impl_(std::make_unique<Impl>()) {}
SpdSolver::~SpdSolver() = default;

void SpdSolver::analyze(const Eigen::SparseMatrix<double>& a) { impl_->llt.analyzePattern(a); }

bool SpdSolver::factorize(const Eigen::SparseMatrix<double>& a) {
  impl_->llt.factorize(a);
  return impl_->llt.info() == Eigen::Success;
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b) const { return impl_->llt.solve(b); }

const char* SpdSolver::backend() {
#if defined(CRACKDUAL_HAVE_CHOLMOD)
  return "cholmod";
#else
  return "eigen-simplicial";
#endif
}

}  // namespace crackdual
