#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "cyto/mesh.hpp"

namespace cyto {

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed-row matrix. Column indices are strictly increasing within a row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
               std::vector<double> values);

  /// Duplicate (row, col) pairs are summed. Explicit zeros are kept so a
  /// triplet list can define a sparsity pattern.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t nnz() const { return col_idx_.size(); }

  std::span<const Index> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Position of (i, j) in values(), or -1.
  std::ptrdiff_t find(Index i, Index j) const;
  double at(Index i, Index j) const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y += scale * A x
  void multiply_add(std::span<const double> x, std::span<double> y, double scale = 1.0) const;

  SparseMatrix transpose() const;
  /// Copy of this pattern with every value set to `fill`.
  SparseMatrix with_pattern_of(double fill = 0.0) const;

  /// Throws Error(DimensionMismatch) on a broken CSR structure.
  void validate() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// Matrix Market coordinate (real general) dump for debugging.
void write_matrix_market(const SparseMatrix& A, const std::filesystem::path& path);

double norm2(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double norm_inf(std::span<const double> x);

}  // namespace cyto
