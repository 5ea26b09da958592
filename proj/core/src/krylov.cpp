#include "cyto/krylov.hpp"

#include <cmath>

#include "cyto/error.hpp"
#include "cyto/sparse.hpp"

namespace cyto {

double GmresResult::reduction_rate() const {
  if (iterations == 0 || final_residual <= 0.0 || initial_residual <= 0.0) return 1.0;
  return std::pow(initial_residual / final_residual, 1.0 / iterations);
}

GmresResult gmres(const LinearOperator& A, const LinearOperator& preconditioner, std::span<const double> b,
                  std::span<double> x, const GmresOptions& options) {
  const std::size_t n = b.size();
  if (x.size() != n) throw Error(ErrorKind::DimensionMismatch, "gmres: size mismatch");

  GmresResult result;
  std::vector<double> r(n), w(n), z(n);
  A(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  const double beta = norm2(r);
  if (!std::isfinite(beta)) throw Error(ErrorKind::NonFinite, "gmres: non-finite initial residual");
  result.initial_residual = beta;
  result.final_residual = beta;
  result.residual_history.push_back(beta);
  if (beta == 0.0) {
    result.converged = true;
    return result;
  }
  const double target = options.rel_tol * beta;

  std::vector<std::vector<double>> V;
  std::vector<std::vector<double>> H;  // column j holds h(0..j+1, j)
  std::vector<double> cs, sn, g{beta};
  V.emplace_back(n);
  for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;

  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    if (preconditioner) {
      preconditioner(in, out);
    } else {
      std::copy(in.begin(), in.end(), out.begin());
    }
  };

  int j = 0;
  bool breakdown = false;
  for (; j < options.max_iter; ++j) {
    precondition(V[j], z);
    A(z, w);
    std::vector<double> h(static_cast<std::size_t>(j) + 2, 0.0);
    for (int i = 0; i <= j; ++i) {
      h[i] = dot(w, V[i]);
      for (std::size_t k = 0; k < n; ++k) w[k] -= h[i] * V[i][k];
    }
    h[j + 1] = norm2(w);
    if (!std::isfinite(h[j + 1])) throw Error(ErrorKind::NonFinite, "gmres: non-finite Arnoldi vector");

    for (int i = 0; i < j; ++i) {
      const double t = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
      h[i] = t;
    }
    const double hjj = h[j], hj1 = h[j + 1];
    const double denom = std::hypot(hjj, hj1);
    breakdown = hj1 <= 1e-14 * std::abs(hjj) || denom == 0.0;
    cs.push_back(denom == 0.0 ? 1.0 : hjj / denom);
    sn.push_back(denom == 0.0 ? 0.0 : hj1 / denom);
    h[j] = cs[j] * hjj + sn[j] * hj1;
    h[j + 1] = 0.0;
    g.push_back(-sn[j] * g[j]);
    g[j] = cs[j] * g[j];
    H.push_back(std::move(h));

    const double res = std::abs(g[j + 1]);
    result.residual_history.push_back(res);
    result.final_residual = res;
    if (res <= target || breakdown) {
      ++j;
      break;
    }
    V.emplace_back(n);
    const double inv = 1.0 / hj1;
    for (std::size_t k = 0; k < n; ++k) V[j + 1][k] = w[k] * inv;
  }
  result.iterations = j;
  result.converged = result.final_residual <= target || breakdown;

  // Back substitution for the Krylov coefficients, then x += M^{-1} V y.
  std::vector<double> y(static_cast<std::size_t>(j), 0.0);
  for (int i = j - 1; i >= 0; --i) {
    double s = g[i];
    for (int k = i + 1; k < j; ++k) s -= H[k][i] * y[k];
    y[i] = H[i][i] != 0.0 ? s / H[i][i] : 0.0;
  }
  std::fill(w.begin(), w.end(), 0.0);
  for (int i = 0; i < j; ++i) {
    for (std::size_t k = 0; k < n; ++k) w[k] += y[i] * V[i][k];
  }
  precondition(w, z);
  for (std::size_t k = 0; k < n; ++k) x[k] += z[k];
  return result;
}

}  // namespace cyto
