#pragma once

#include <span>

#include "cyto/sparse.hpp"

namespace cyto {

/// Zero fill-in incomplete LU. L (unit diagonal, strict lower part) and U
/// share the storage and the sparsity pattern of the input matrix.
class Ilu0 {
 public:
  /// A zero pivot triggers one retry with the diagonal shifted by
  /// 1e-12 * max|diag|; a second failure throws ZeroPivotError.
  explicit Ilu0(const SparseMatrix& A);

  /// x = (L U)^{-1} b. `x` and `b` may alias.
  void solve(std::span<const double> b, std::span<double> x) const;

  const SparseMatrix& factors() const { return lu_; }
  SparseMatrix lower() const;
  SparseMatrix upper() const;
  bool shifted() const { return shifted_; }
  Index size() const { return lu_.rows(); }

 private:
  bool factor(double shift);

  SparseMatrix lu_;
  std::vector<Index> diag_;
  Index failed_row_ = -1;
  bool shifted_ = false;
};

}  // namespace cyto
