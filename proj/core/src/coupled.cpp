#include "cyto/coupled.hpp"

#include "cyto/error.hpp"

namespace cyto {

void CoupledMatrix::validate() const {
  const Index np = n_pde(), no = n_ode();
  if (A_uu.cols() != np || A_uv.rows() != np || A_uv.cols() != no || B_vu.rows() != no || B_vu.cols() != np) {
    throw Error(ErrorKind::DimensionMismatch, "CoupledMatrix: inconsistent block dimensions");
  }
}

void CoupledMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  const auto np = static_cast<std::size_t>(n_pde());
  if (x.size() != static_cast<std::size_t>(size()) || y.size() != x.size()) {
    throw Error(ErrorKind::DimensionMismatch, "CoupledMatrix::multiply: size mismatch");
  }
  const auto xu = x.subspan(0, np), xv = x.subspan(np);
  const auto yu = y.subspan(0, np), yv = y.subspan(np);
  A_uu.multiply(xu, yu);
  A_uv.multiply_add(xv, yu);
  B_vu.multiply(xu, yv);
  for (std::size_t c = 0; c < B_vv.size(); ++c) {
    const Block3& b = B_vv[c];
    const double* v = &xv[3 * c];
    for (int a = 0; a < 3; ++a) yv[3 * c + a] += b[3 * a] * v[0] + b[3 * a + 1] * v[1] + b[3 * a + 2] * v[2];
  }
}

PartitionedVector CoupledMatrix::multiply(const PartitionedVector& x) const {
  PartitionedVector y(n_pde(), n_ode());
  multiply(x.all(), y.all());
  return y;
}

SparseMatrix CoupledMatrix::flatten() const {
  validate();
  const Index np = n_pde();
  std::vector<Triplet> t;
  t.reserve(A_uu.nnz() + A_uv.nnz() + B_vu.nnz() + 9 * B_vv.size());
  auto append = [&](const SparseMatrix& A, Index row0, Index col0) {
    const auto rp = A.row_ptr();
    const auto ci = A.col_idx();
    const auto va = A.values();
    for (Index i = 0; i < A.rows(); ++i)
      for (Index k = rp[i]; k < rp[i + 1]; ++k) t.push_back({row0 + i, col0 + ci[k], va[k]});
  };
  append(A_uu, 0, 0);
  append(A_uv, 0, np);
  append(B_vu, np, 0);
  for (std::size_t c = 0; c < B_vv.size(); ++c) {
    const auto base = np + static_cast<Index>(3 * c);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) t.push_back({base + a, base + b, B_vv[c][3 * a + b]});
  }
  return SparseMatrix::from_triplets(size(), size(), std::move(t));
}

}  // namespace cyto
