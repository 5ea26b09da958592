#pragma once

#include <array>
#include <span>
#include <vector>

#include "cyto/sparse.hpp"

namespace cyto {

/// PDE nodal values followed by the ODE unknowns (R, C, E per cell) in one
/// contiguous buffer.
class PartitionedVector {
 public:
  PartitionedVector() = default;
  PartitionedVector(Index n_pde, Index n_ode, double fill = 0.0)
      : n_pde_(n_pde), data_(static_cast<std::size_t>(n_pde + n_ode), fill) {}

  Index n_pde() const { return n_pde_; }
  Index n_ode() const { return static_cast<Index>(data_.size()) - n_pde_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> pde() { return {data_.data(), static_cast<std::size_t>(n_pde_)}; }
  std::span<const double> pde() const { return {data_.data(), static_cast<std::size_t>(n_pde_)}; }
  std::span<double> ode() { return {data_.data() + n_pde_, static_cast<std::size_t>(n_ode())}; }
  std::span<const double> ode() const { return {data_.data() + n_pde_, static_cast<std::size_t>(n_ode())}; }
  std::span<double> all() { return data_; }
  std::span<const double> all() const { return data_; }

 private:
  Index n_pde_ = 0;
  std::vector<double> data_;
};

using Block3 = std::array<double, 9>;  // row-major 3x3

/// Jacobian of the coupled system in 2x2 block form
///   [ A_uu  A_uv ]
///   [ B_vu  B_vv ]
/// with B_vv block diagonal (one dense 3x3 block per cell).
struct CoupledMatrix {
  int level = 0;
  SparseMatrix A_uu;
  SparseMatrix A_uv;
  SparseMatrix B_vu;
  std::vector<Block3> B_vv;

  Index n_pde() const { return A_uu.rows(); }
  Index n_ode() const { return static_cast<Index>(3 * B_vv.size()); }
  Index size() const { return n_pde() + n_ode(); }

  void validate() const;

  /// y = K x on the concatenated [pde; ode] layout.
  void multiply(std::span<const double> x, std::span<double> y) const;
  PartitionedVector multiply(const PartitionedVector& x) const;

  /// Single CSR matrix, PDE rows/columns first, then ODE; every 3x3 block
  /// contributes its full dense pattern.
  SparseMatrix flatten() const;
};

}  // namespace cyto
