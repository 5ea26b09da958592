#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <random>

#include "cyto/coupled.hpp"
#include "cyto/dense.hpp"
#include "cyto/direct.hpp"
#include "cyto/error.hpp"
#include "cyto/ilu.hpp"
#include "cyto/krylov.hpp"
#include "cyto/sparse.hpp"
#include "oracles.hpp"

using namespace cyto;

namespace {

SparseMatrix random_sparse(Index n, double density, std::mt19937_64& rng, double diag = 0.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), p(0.0, 1.0);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) t.push_back({i, j, diag + u(rng)});
      else if (p(rng) < density) t.push_back({i, j, u(rng)});
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix tridiagonal(Index n) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i, 4.0});
    if (i > 0) t.push_back({i, i - 1, -1.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.5});
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix diagonal(std::span<const double> d) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < d.size(); ++i) t.push_back({static_cast<Index>(i), static_cast<Index>(i), d[i]});
  return SparseMatrix::from_triplets(static_cast<Index>(d.size()), static_cast<Index>(d.size()), std::move(t));
}

LinearOperator op(const SparseMatrix& A) {
  return [&A](std::span<const double> x, std::span<double> y) { A.multiply(x, y); };
}

}  // namespace

TEST_CASE("triplet assembly sums duplicates and sorts columns") {
  const SparseMatrix A = SparseMatrix::from_triplets(2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 3.0}, {1, 1, 0.0}});
  CHECK(A.nnz() == 3);
  CHECK(A.at(0, 2) == 4.0);
  CHECK(A.at(0, 0) == 2.0);
  CHECK(A.find(1, 1) >= 0);  // explicit zero kept
  CHECK(A.find(1, 0) < 0);
  CHECK(A.at(1, 0) == 0.0);
  CHECK_NOTHROW(A.validate());
  CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 2, 1}, {1, 0, 0}, {1, 1, 1}), Error);
}

TEST_CASE("sparse multiply and transpose agree with a dense oracle") {
  std::mt19937_64 rng(3);
  const SparseMatrix A = random_sparse(40, 0.1, rng);
  const auto x = oracle::random_vector(40, rng);
  std::vector<double> y(40);
  A.multiply(x, y);
  const Eigen::MatrixXd D = oracle::dense(A);
  CHECK((oracle::vec(y) - D * oracle::vec(x)).norm() < 1e-13);
  CHECK((oracle::dense(A.transpose()) - D.transpose()).norm() == 0.0);
  std::vector<double> z(y);
  A.multiply_add(x, z, -1.0);
  CHECK(norm_inf(z) < 1e-14);
}

TEST_CASE("coupled matvec matches the dense block matrix") {
  std::mt19937_64 rng(11);
  const Index np = 150, nc = 4, no = 3 * nc;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CoupledMatrix K;
  K.A_uu = random_sparse(np, 0.05, rng, 3.0);
  std::vector<Triplet> uv, vu;
  for (Index c = 0; c < nc; ++c) {
    for (Index r = 10 * c; r < 10 * c + 10; ++r) {
      uv.push_back({r, 3 * c, u(rng)});
      uv.push_back({r, 3 * c + 1, u(rng)});
      for (int a = 0; a < 3; ++a) vu.push_back({3 * c + a, r, u(rng)});
    }
    Block3 b;
    for (double& x : b) x = u(rng);
    K.B_vv.push_back(b);
  }
  K.A_uv = SparseMatrix::from_triplets(np, no, uv);
  K.B_vu = SparseMatrix::from_triplets(no, np, vu);
  CHECK_NOTHROW(K.validate());
  const auto x = oracle::random_vector(static_cast<std::size_t>(np + no), rng);
  std::vector<double> y(x.size());
  K.multiply(x, y);
  const Eigen::MatrixXd D = oracle::dense(K);
  CHECK((oracle::vec(y) - D * oracle::vec(x)).norm() < 1e-12);
  CHECK((oracle::dense(K.flatten()) - D).norm() == 0.0);

  std::vector<double> zero(x.size(), 0.0), out(x.size(), 1.0);
  K.multiply(zero, out);
  CHECK(norm_inf(out) == 0.0);
  std::vector<double> short_x(5);
  CHECK_THROWS_AS(K.multiply(short_x, out), Error);
}

TEST_CASE("ILU(0) of the identity is the identity") {
  const std::vector<double> ones(10, 1.0);
  const Ilu0 ilu(diagonal(ones));
  CHECK((oracle::dense(ilu.lower()) - Eigen::MatrixXd::Identity(10, 10)).norm() == 0.0);
  CHECK((oracle::dense(ilu.upper()) - Eigen::MatrixXd::Identity(10, 10)).norm() == 0.0);
}

TEST_CASE("ILU(0) is exact when the LU factors fit the pattern") {
  const SparseMatrix A = tridiagonal(30);
  const Ilu0 ilu(A);
  const Eigen::MatrixXd LU = oracle::dense(ilu.lower()) * oracle::dense(ilu.upper());
  const Eigen::MatrixXd D = oracle::dense(A);
  CHECK((LU - D).cwiseAbs().maxCoeff() < 1e-12 * D.cwiseAbs().maxCoeff());
  std::mt19937_64 rng(5);
  const auto b = oracle::random_vector(30, rng);
  std::vector<double> x(30);
  ilu.solve(b, x);
  const Eigen::VectorXd ref = D.partialPivLu().solve(oracle::vec(b));
  CHECK((oracle::vec(x) - ref).norm() < 1e-12 * ref.norm());
}

TEST_CASE("ILU(0) keeps the sparsity pattern of a random matrix") {
  std::mt19937_64 rng(8);
  const SparseMatrix A = random_sparse(50, 0.08, rng, 6.0);
  const Ilu0 ilu(A);
  const SparseMatrix& F = ilu.factors();
  REQUIRE(F.nnz() == A.nnz());
  CHECK(std::equal(F.row_ptr().begin(), F.row_ptr().end(), A.row_ptr().begin()));
  CHECK(std::equal(F.col_idx().begin(), F.col_idx().end(), A.col_idx().begin()));
}

TEST_CASE("ILU(0) shifts a single zero pivot and reports the row when the shift cannot help") {
  const SparseMatrix A = SparseMatrix::from_triplets(3, 3, {{0, 0, 1.0}, {1, 1, 0.0}, {1, 2, 1.0}, {2, 1, 1.0}, {2, 2, 1.0}});
  const Ilu0 shifted(A);
  CHECK(shifted.shifted());

  const SparseMatrix Z = SparseMatrix::from_triplets(2, 2, {{0, 0, 0.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 0.0}});
  try {
    Ilu0 ilu(Z);
    FAIL("expected ZeroPivotError");
  } catch (const ZeroPivotError& e) {
    CHECK(e.row() == 0);
    CHECK(e.kind() == ErrorKind::ZeroPivot);
  }
}

TEST_CASE("GMRES with the identity converges in one iteration") {
  const std::vector<double> ones(20, 1.0);
  const SparseMatrix I = diagonal(ones);
  std::mt19937_64 rng(1);
  const auto b = oracle::random_vector(20, rng);
  std::vector<double> x(20, 0.0);
  const GmresResult r = gmres(op(I), {}, b, x);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(oracle::max_abs_diff(x, b) < 1e-14);
}

TEST_CASE("GMRES needs at most three iterations for three distinct eigenvalues") {
  std::vector<double> d(30);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = 1.0 + static_cast<double>(i % 3);
  const SparseMatrix D = diagonal(d);
  std::mt19937_64 rng(2);
  const auto b = oracle::random_vector(30, rng);
  std::vector<double> x(30, 0.0);
  const GmresResult r = gmres(op(D), {}, b, x, {1e-12, 100});
  CHECK(r.converged);
  CHECK(r.iterations <= 4);
}

TEST_CASE("GMRES on a random SPD system matches the dense solve") {
  const Index n = 60;
  std::mt19937_64 rng(4);
  Eigen::MatrixXd B = Eigen::MatrixXd::Random(n, n);
  Eigen::MatrixXd S = B * B.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) t.push_back({i, j, S(i, j)});
  const SparseMatrix A = SparseMatrix::from_triplets(n, n, t);
  const auto b = oracle::random_vector(n, rng);
  std::vector<double> x(n, 0.0);
  const GmresResult r = gmres(op(A), {}, b, x, {1e-11, 200});
  CHECK(r.converged);
  const Eigen::VectorXd ref = S.llt().solve(oracle::vec(b));
  CHECK((oracle::vec(x) - ref).norm() <= 1e-9 * ref.norm());
  for (std::size_t i = 1; i < r.residual_history.size(); ++i) {
    CHECK(r.residual_history[i] <= r.residual_history[i - 1] * (1 + 1e-12));
  }
  CHECK(r.residual_history.front() == doctest::Approx(r.initial_residual));
}

TEST_CASE("GMRES with an exact preconditioner converges in one iteration") {
  std::mt19937_64 rng(6);
  const SparseMatrix A = random_sparse(80, 0.05, rng, 5.0);
  const SparseDirectSolver lu(A);
  const auto b = oracle::random_vector(80, rng);
  std::vector<double> x(80, 0.0);
  const GmresResult r = gmres(op(A), [&](auto in, auto out) { lu.solve(in, out); }, b, x);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  std::vector<double> ax(80);
  A.multiply(x, ax);
  CHECK(oracle::max_abs_diff(ax, b) < 1e-11);
}

TEST_CASE("GMRES flags non-convergence and rejects non-finite input") {
  std::mt19937_64 rng(7);
  const SparseMatrix A = random_sparse(50, 0.2, rng, 0.5);
  const auto b = oracle::random_vector(50, rng);
  std::vector<double> x(50, 0.0);
  const GmresResult r = gmres(op(A), {}, b, x, {1e-14, 3});
  CHECK(!r.converged);
  CHECK(r.iterations == 3);
  std::vector<double> bad(b);
  bad[3] = std::nan("");
  std::fill(x.begin(), x.end(), 0.0);
  CHECK_THROWS_AS(gmres(op(A), {}, bad, x), Error);
}

TEST_CASE("GMRES with zero right-hand side returns immediately") {
  const std::vector<double> ones(5, 1.0);
  const SparseMatrix I = diagonal(ones);
  std::vector<double> b(5, 0.0), x(5, 0.0);
  const GmresResult r = gmres(op(I), {}, b, x);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
}

TEST_CASE("dense LU solves") {
  DenseMatrix I = DenseMatrix::identity(3);
  const std::vector<double> b{1.0, 2.0, 3.0};
  CHECK(dense_solve(I, b) == b);
  DenseMatrix D(2, 2);
  D(0, 0) = 2;
  D(1, 1) = 4;
  const auto x = dense_solve(D, std::vector<double>{2.0, 4.0});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));

  std::mt19937_64 rng(9);
  DenseMatrix A(100, 100);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t i = 0; i < 100; ++i)
    for (std::size_t j = 0; j < 100; ++j) A(i, j) = u(rng) + (i == j ? 10.0 : 0.0);
  const auto rhs = oracle::random_vector(100, rng);
  const auto sol = dense_solve(A, rhs);
  const auto Ax = A.multiply(sol);
  double res = 0, nb = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    res += (Ax[i] - rhs[i]) * (Ax[i] - rhs[i]);
    nb += rhs[i] * rhs[i];
  }
  CHECK(std::sqrt(res) <= 1e-12 * std::sqrt(nb));

  DenseMatrix S(2, 2);
  S(0, 0) = 1;
  S(0, 1) = 2;
  S(1, 0) = 2;
  S(1, 1) = 4;
  CHECK_THROWS_AS(DenseLU{S}, Error);
}

TEST_CASE("3x3 inverse") {
  const Block3 a{4, 1, 0, 1, 3, 1, 0, 1, 2};
  const Block3 inv = invert3(a);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a[3 * i + k] * inv[3 * k + j];
      CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0));
    }
  CHECK_THROWS_AS(invert3({1, 2, 3, 2, 4, 6, 0, 0, 1}), Error);
}

TEST_CASE("closed-form 2x2 eigenvalues") {
  CHECK(spectral_radius2x2(1, 0, 0, 2) == doctest::Approx(2.0));
  const Eigenvalues2 rot = eig2x2(0, -1, 1, 0);
  CHECK(rot.spectral_radius() == doctest::Approx(1.0));
  CHECK(std::abs(rot.first.imag()) == doctest::Approx(1.0));
  CHECK(rot.first.real() == doctest::Approx(0.0));

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 50; ++k) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    const Eigenvalues2 e = eig2x2(a, b, c, d);
    for (const std::complex<double>& l : {e.first, e.second}) {
      const std::complex<double> p = l * l - (a + d) * l + (a * d - b * c);
      CHECK(std::abs(p) < 1e-10 * (1 + std::norm(l)));
    }
    Eigen::Matrix2d M;
    M << a, b, c, d;
    CHECK(e.spectral_radius() == doctest::Approx(M.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-10));
  }
}

TEST_CASE("sparse direct solver and Matrix Market dump") {
  std::mt19937_64 rng(12);
  const SparseMatrix A = random_sparse(120, 0.03, rng, 4.0);
  const SparseDirectSolver lu(A);
  CHECK(lu.size() == 120);
  const auto b = oracle::random_vector(120, rng);
  std::vector<double> x(120);
  lu.solve(b, x);
  std::vector<double> ax(120);
  A.multiply(x, ax);
  CHECK(oracle::max_abs_diff(ax, b) < 1e-12);

  const SparseMatrix singular = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
  CHECK_THROWS_AS(SparseDirectSolver{singular}, Error);

  const auto path = std::filesystem::temp_directory_path() / "cyto_mm_test.mtx";
  write_matrix_market(A, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("%%MatrixMarket matrix coordinate real general", 0) == 0);
  std::filesystem::remove(path);
}
