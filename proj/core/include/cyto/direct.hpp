#pragma once

#include <memory>
#include <span>

#include "cyto/sparse.hpp"

namespace cyto {

/// Sparse LU with fill-reducing column ordering; used for the coarsest
/// multigrid level. Backed by Eigen::SparseLU.
class SparseDirectSolver {
 public:
  /// Throws Error(SingularMatrix) if the factorization fails.
  explicit SparseDirectSolver(const SparseMatrix& A);
  ~SparseDirectSolver();
  SparseDirectSolver(SparseDirectSolver&&) noexcept;
  SparseDirectSolver& operator=(SparseDirectSolver&&) noexcept;

  Index size() const { return n_; }
  void solve(std::span<const double> b, std::span<double> x) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Index n_ = 0;
};

}  // namespace cyto
