#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace cyto {

/// Row-major dense matrix for small systems (ODE blocks, test oracles).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

  std::vector<double> multiply(std::span<const double> x) const;
  DenseMatrix operator*(const DenseMatrix& other) const;
  DenseMatrix transpose() const;
  double max_abs() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// LU factorization with partial pivoting.
class DenseLU {
 public:
  /// Throws Error(SingularMatrix) when a pivot is zero to working precision.
  explicit DenseLU(DenseMatrix A);

  std::size_t size() const { return lu_.rows(); }
  void solve_in_place(std::span<double> b) const;
  std::vector<double> solve(std::span<const double> b) const;

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
};

std::vector<double> dense_solve(const DenseMatrix& A, std::span<const double> b);

/// Inverse of a 3x3 matrix stored row-major; throws Error(SingularMatrix).
std::array<double, 9> invert3(const std::array<double, 9>& a);

struct Eigenvalues2 {
  std::complex<double> first;
  std::complex<double> second;
  double spectral_radius() const { return std::max(std::abs(first), std::abs(second)); }
};

/// Closed-form eigenvalues of [[a, b], [c, d]] from trace and determinant.
Eigenvalues2 eig2x2(double a, double b, double c, double d);
inline double spectral_radius2x2(double a, double b, double c, double d) {
  return eig2x2(a, b, c, d).spectral_radius();
}

}  // namespace cyto
