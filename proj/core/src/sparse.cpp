#include "cyto/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "cyto/error.hpp"

namespace cyto {

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {
  validate();
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw Error(ErrorKind::DimensionMismatch, "triplet index out of range");
    }
  }
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  SparseMatrix A;
  A.rows_ = rows;
  A.cols_ = cols;
  A.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
  A.col_idx_.reserve(triplets.size());
  A.values_.reserve(triplets.size());
  for (std::size_t n = 0; n < triplets.size(); ++n) {
    const auto& t = triplets[n];
    if (n > 0 && triplets[n - 1].row == t.row && triplets[n - 1].col == t.col) {
      A.values_.back() += t.value;
      continue;
    }
    A.col_idx_.push_back(t.col);
    A.values_.push_back(t.value);
    ++A.row_ptr_[t.row + 1];
  }
  for (Index i = 0; i < rows; ++i) A.row_ptr_[i + 1] += A.row_ptr_[i];
  return A;
}

std::ptrdiff_t SparseMatrix::find(Index i, Index j) const {
  const auto first = col_idx_.begin() + row_ptr_[i];
  const auto last = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? (it - col_idx_.begin()) : -1;
}

double SparseMatrix::at(Index i, Index j) const {
  const auto k = find(i, j);
  return k < 0 ? 0.0 : values_[k];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<Index>(x.size()) != cols_ || static_cast<Index>(y.size()) != rows_) {
    throw Error(ErrorKind::DimensionMismatch, "SparseMatrix::multiply: size mismatch");
  }
  for (Index i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) sum += values_[k] * x[col_idx_[k]];
    y[i] = sum;
  }
}

void SparseMatrix::multiply_add(std::span<const double> x, std::span<double> y, double scale) const {
  if (static_cast<Index>(x.size()) != cols_ || static_cast<Index>(y.size()) != rows_) {
    throw Error(ErrorKind::DimensionMismatch, "SparseMatrix::multiply_add: size mismatch");
  }
  for (Index i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) sum += values_[k] * x[col_idx_[k]];
    y[i] += scale * sum;
  }
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix T;
  T.rows_ = cols_;
  T.cols_ = rows_;
  T.row_ptr_.assign(static_cast<std::size_t>(cols_) + 1, 0);
  for (Index c : col_idx_) ++T.row_ptr_[c + 1];
  for (Index i = 0; i < cols_; ++i) T.row_ptr_[i + 1] += T.row_ptr_[i];
  T.col_idx_.resize(col_idx_.size());
  T.values_.resize(values_.size());
  std::vector<Index> next(T.row_ptr_.begin(), T.row_ptr_.end() - 1);
  for (Index i = 0; i < rows_; ++i) {
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const Index dst = next[col_idx_[k]]++;
      T.col_idx_[dst] = i;
      T.values_[dst] = values_[k];
    }
  }
  return T;
}

SparseMatrix SparseMatrix::with_pattern_of(double fill) const {
  SparseMatrix A = *this;
  std::fill(A.values_.begin(), A.values_.end(), fill);
  return A;
}

void SparseMatrix::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorKind::DimensionMismatch, std::string("SparseMatrix: ") + what); };
  if (rows_ < 0 || cols_ < 0) fail("negative dimension");
  if (row_ptr_.size() != static_cast<std::size_t>(rows_) + 1 || row_ptr_.front() != 0) fail("bad row offsets");
  if (static_cast<std::size_t>(row_ptr_.back()) != col_idx_.size() || col_idx_.size() != values_.size()) {
    fail("offsets do not match entry count");
  }
  for (Index i = 0; i < rows_; ++i) {
    if (row_ptr_[i + 1] < row_ptr_[i]) fail("row offsets not monotone");
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] < 0 || col_idx_[k] >= cols_) fail("column index out of range");
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1]) fail("columns not strictly increasing");
    }
  }
}

void write_matrix_market(const SparseMatrix& A, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  const auto rp = A.row_ptr();
  const auto ci = A.col_idx();
  const auto va = A.values();
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index k = rp[i]; k < rp[i + 1]; ++k) out << i + 1 << ' ' << ci[k] + 1 << ' ' << va[k] << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace cyto
