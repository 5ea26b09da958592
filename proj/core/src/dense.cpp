#include "cyto/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cyto/error.hpp"

namespace cyto {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw Error(ErrorKind::DimensionMismatch, "DenseMatrix::multiply: size mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += data_[i * cols_ + j] * x[j];
    y[i] = s;
  }
  return y;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& other) const {
  if (cols_ != other.rows_) throw Error(ErrorKind::DimensionMismatch, "DenseMatrix product: size mismatch");
  DenseMatrix C(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = data_[i * cols_ + k];
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) C(i, j) += a * other(k, j);
    }
  }
  return C;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix T(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
  return T;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

DenseLU::DenseLU(DenseMatrix A) : lu_(std::move(A)) {
  const std::size_t n = lu_.rows();
  if (lu_.cols() != n) throw Error(ErrorKind::DimensionMismatch, "DenseLU: matrix not square");
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  const double scale = std::max(lu_.max_abs(), std::numeric_limits<double>::min());
  const double tiny = static_cast<double>(std::max<std::size_t>(n, 1)) * std::numeric_limits<double>::epsilon() * scale;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        p = i;
      }
    }
    if (!(best > tiny)) throw Error(ErrorKind::SingularMatrix, "DenseLU: matrix is singular to working precision");
    if (p != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
      std::swap(perm_[k], perm_[p]);
    }
    const double pivot = lu_(k, k);
    const auto rk = lu_.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      auto ri = lu_.row(i);
      const double l = ri[k] / pivot;
      ri[k] = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
}

void DenseLU::solve_in_place(std::span<double> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw Error(ErrorKind::DimensionMismatch, "DenseLU::solve: size mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    const auto ri = lu_.row(i);
    for (std::size_t j = 0; j < i; ++j) s -= ri[j] * y[j];
    y[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    const auto ri = lu_.row(i);
    for (std::size_t j = i + 1; j < n; ++j) s -= ri[j] * y[j];
    y[i] = s / ri[i];
  }
  std::copy(y.begin(), y.end(), b.begin());
}

std::vector<double> DenseLU::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

std::vector<double> dense_solve(const DenseMatrix& A, std::span<const double> b) { return DenseLU(A).solve(b); }

std::array<double, 9> invert3(const std::array<double, 9>& a) {
  const double c00 = a[4] * a[8] - a[5] * a[7];
  const double c01 = a[5] * a[6] - a[3] * a[8];
  const double c02 = a[3] * a[7] - a[4] * a[6];
  const double det = a[0] * c00 + a[1] * c01 + a[2] * c02;
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (!(std::abs(det) > 1e-14 * scale * scale * scale)) {
    throw Error(ErrorKind::SingularMatrix, "invert3: singular 3x3 block");
  }
  const double inv = 1.0 / det;
  return {
      c00 * inv, (a[2] * a[7] - a[1] * a[8]) * inv, (a[1] * a[5] - a[2] * a[4]) * inv,
      c01 * inv, (a[0] * a[8] - a[2] * a[6]) * inv, (a[2] * a[3] - a[0] * a[5]) * inv,
      c02 * inv, (a[1] * a[6] - a[0] * a[7]) * inv, (a[0] * a[4] - a[1] * a[3]) * inv,
  };
}

Eigenvalues2 eig2x2(double a, double b, double c, double d) {
  const double half_trace = 0.5 * (a + d);
  const double det = a * d - b * c;
  const std::complex<double> disc = std::sqrt(std::complex<double>(half_trace * half_trace - det, 0.0));
  return {half_trace + disc, half_trace - disc};
}

}  // namespace cyto
