#include "cyto/direct.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "cyto/error.hpp"

namespace cyto {

struct SparseDirectSolver::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>, Eigen::COLAMDOrdering<int>> lu;
};

SparseDirectSolver::SparseDirectSolver(const SparseMatrix& A) : impl_(std::make_unique<Impl>()), n_(A.rows()) {
  if (A.rows() != A.cols()) throw Error(ErrorKind::DimensionMismatch, "SparseDirectSolver: matrix not square");
  std::vector<Eigen::Triplet<double, int>> t;
  t.reserve(A.nnz());
  const auto rp = A.row_ptr();
  const auto ci = A.col_idx();
  const auto va = A.values();
  for (Index i = 0; i < A.rows(); ++i)
    for (Index k = rp[i]; k < rp[i + 1]; ++k) t.emplace_back(i, ci[k], va[k]);
  Eigen::SparseMatrix<double, Eigen::ColMajor, int> M(A.rows(), A.cols());
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  impl_->lu.compute(M);
  if (impl_->lu.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularMatrix, "SparseDirectSolver: factorization failed: " + impl_->lu.lastErrorMessage());
  }
}

SparseDirectSolver::~SparseDirectSolver() = default;
SparseDirectSolver::SparseDirectSolver(SparseDirectSolver&&) noexcept = default;
SparseDirectSolver& SparseDirectSolver::operator=(SparseDirectSolver&&) noexcept = default;

void SparseDirectSolver::solve(std::span<const double> b, std::span<double> x) const {
  if (static_cast<Index>(b.size()) != n_ || static_cast<Index>(x.size()) != n_) {
    throw Error(ErrorKind::DimensionMismatch, "SparseDirectSolver::solve: size mismatch");
  }
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n_);
  Eigen::VectorXd sol = impl_->lu.solve(rhs);
  Eigen::Map<Eigen::VectorXd>(x.data(), n_) = sol;
}

}  // namespace cyto
