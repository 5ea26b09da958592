#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cyto {

/// y = Op(x); x and y never alias.
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

struct GmresOptions {
  double rel_tol = 1e-11;  // relative to the initial residual norm
  int max_iter = 500;
};

struct GmresResult {
  int iterations = 0;
  bool converged = false;
  double initial_residual = 0.0;
  double final_residual = 0.0;  // Arnoldi estimate
  std::vector<double> residual_history;  // includes the initial residual

  /// Average residual reduction factor per iteration.
  double reduction_rate() const;
};

/// Right-preconditioned, unrestarted GMRES (modified Gram-Schmidt, Givens
/// rotations). `x` holds the initial guess on entry and the iterate on
/// return. A null preconditioner means the identity. Throws
/// Error(NonFinite) when the Arnoldi process produces NaN/Inf.
GmresResult gmres(const LinearOperator& A, const LinearOperator& preconditioner, std::span<const double> b,
                  std::span<double> x, const GmresOptions& options = {});

}  // namespace cyto
