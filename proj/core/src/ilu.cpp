#include "cyto/ilu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cyto/error.hpp"

namespace cyto {

Ilu0::Ilu0(const SparseMatrix& A) : lu_(A) {
  if (A.rows() != A.cols()) throw Error(ErrorKind::DimensionMismatch, "Ilu0: matrix not square");
  if (factor(0.0)) return;
  double max_diag = 0.0;
  for (Index i = 0; i < A.rows(); ++i) max_diag = std::max(max_diag, std::abs(A.at(i, i)));
  lu_ = A;
  shifted_ = true;
  if (!factor(1e-12 * max_diag)) {
    throw ZeroPivotError(static_cast<std::size_t>(failed_row_),
                         "Ilu0: zero pivot in row " + std::to_string(failed_row_) + " after diagonal shift");
  }
}

bool Ilu0::factor(double shift) {
  const Index n = lu_.rows();
  const auto rp = lu_.row_ptr();
  const auto ci = lu_.col_idx();
  auto va = lu_.values();
  diag_.assign(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const auto k = lu_.find(i, i);
    if (k < 0) {
      failed_row_ = i;
      return false;
    }
    diag_[i] = static_cast<Index>(k);
    va[k] += shift;
  }

  // IKJ elimination restricted to the existing pattern.
  std::vector<Index> pos(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    double row_scale = 0.0;
    for (Index k = rp[i]; k < rp[i + 1]; ++k) {
      pos[ci[k]] = k;
      row_scale = std::max(row_scale, std::abs(va[k]));
    }
    for (Index k = rp[i]; k < rp[i + 1] && ci[k] < i; ++k) {
      const Index col = ci[k];
      const double l = va[k] / va[diag_[col]];
      va[k] = l;
      if (l == 0.0) continue;
      for (Index m = diag_[col] + 1; m < rp[col + 1]; ++m) {
        const Index p = pos[ci[m]];
        if (p >= 0) va[p] -= l * va[m];
      }
    }
    const double pivot = va[diag_[i]];
    for (Index k = rp[i]; k < rp[i + 1]; ++k) pos[ci[k]] = -1;
    const double tiny = std::numeric_limits<double>::epsilon() * std::numeric_limits<double>::epsilon() *
                        std::max(row_scale, std::numeric_limits<double>::min());
    if (!std::isfinite(pivot) || std::abs(pivot) <= tiny) {
      failed_row_ = i;
      return false;
    }
  }
  return true;
}

void Ilu0::solve(std::span<const double> b, std::span<double> x) const {
  const Index n = lu_.rows();
  if (static_cast<Index>(b.size()) != n || static_cast<Index>(x.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "Ilu0::solve: size mismatch");
  }
  const auto rp = lu_.row_ptr();
  const auto ci = lu_.col_idx();
  const auto va = lu_.values();
  if (x.data() != b.data()) std::copy(b.begin(), b.end(), x.begin());
  for (Index i = 0; i < n; ++i) {
    double s = x[i];
    for (Index k = rp[i]; k < diag_[i]; ++k) s -= va[k] * x[ci[k]];
    x[i] = s;
  }
  for (Index i = n; i-- > 0;) {
    double s = x[i];
    for (Index k = diag_[i] + 1; k < rp[i + 1]; ++k) s -= va[k] * x[ci[k]];
    x[i] = s / va[diag_[i]];
  }
}

SparseMatrix Ilu0::lower() const {
  std::vector<Triplet> t;
  const auto rp = lu_.row_ptr();
  const auto ci = lu_.col_idx();
  const auto va = lu_.values();
  for (Index i = 0; i < lu_.rows(); ++i) {
    for (Index k = rp[i]; k < diag_[i]; ++k) t.push_back({i, ci[k], va[k]});
    t.push_back({i, i, 1.0});
  }
  return SparseMatrix::from_triplets(lu_.rows(), lu_.cols(), std::move(t));
}

SparseMatrix Ilu0::upper() const {
  std::vector<Triplet> t;
  const auto rp = lu_.row_ptr();
  const auto ci = lu_.col_idx();
  const auto va = lu_.values();
  for (Index i = 0; i < lu_.rows(); ++i) {
    for (Index k = diag_[i]; k < rp[i + 1]; ++k) t.push_back({i, ci[k], va[k]});
  }
  return SparseMatrix::from_triplets(lu_.rows(), lu_.cols(), std::move(t));
}

}  // namespace cyto
