#include "cyto/il2_model.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "cyto/error.hpp"

namespace cyto {

void ModelParams::validate() const {
  std::ostringstream msg;
  if (!(mu > 0.0)) msg << "mu must be positive; ";
  if (!(K_half > 0.0)) msg << "K_half must be positive; ";
  if (!(alpha > 0.0)) msg << "alpha must be positive; ";
  const std::array<double, 9> rates = {k_d, w0, w1, k_on, k_off, k_iR, k_iC, k_rec, k_deg};
  if (std::any_of(rates.begin(), rates.end(), [](double r) { return !(r >= 0.0); })) {
    msg << "rate constants must be nonnegative; ";
  }
  if (std::any_of(q.begin(), q.end(), [](double r) { return !(r >= 0.0); })) {
    msg << "secretion rates must be nonnegative; ";
  }
  const std::string text = msg.str();
  if (!text.empty()) throw Error(ErrorKind::InvalidConfig, "invalid model parameters: " + text);
}

std::vector<CellSpec> cell_specs(const ModelParams& params) {
  std::vector<CellSpec> cells;
  cells.reserve(params.q.size());
  for (std::size_t i = 0; i < params.q.size(); ++i) {
    cells.push_back({static_cast<int>(i), params.q[i] > 0.0, params.q[i]});
  }
  return cells;
}

std::vector<int> choose_secreting(int num_cells, int count, std::uint64_t seed) {
  if (count < 0 || count > num_cells) {
    throw Error(ErrorKind::InvalidConfig, "secreting cell count out of range");
  }
  std::vector<int> cells(static_cast<std::size_t>(num_cells));
  std::iota(cells.begin(), cells.end(), 0);
  // Partial Fisher-Yates on a fixed-algorithm engine, so the draw does not
  // depend on the standard library's distribution implementation.
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const auto span = static_cast<std::uint64_t>(num_cells - i);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    std::swap(cells[i], cells[i + static_cast<int>(draw % span)]);
  }
  cells.resize(static_cast<std::size_t>(count));
  std::sort(cells.begin(), cells.end());
  return cells;
}

Receptors ode_rhs(double u_tilde, const Receptors& v, const ModelParams& p) {
  const double R = v[kR], C = v[kC], E = v[kE];
  const double K3 = p.K_half * p.K_half * p.K_half;
  const double C3 = C * C * C;
  const double binding = p.k_on * R * u_tilde;
  return {
      p.w0 + p.w1 * C3 / (K3 + C3) - binding - p.k_iR * R + p.k_off * C + p.k_rec * E,
      binding - (p.k_off + p.k_iC) * C,
      p.k_iC * C - (p.k_rec + p.k_deg) * E,
  };
}

RhsJacobian ode_jacobian(double u_tilde, const Receptors& v, const ModelParams& p) {
  const double R = v[kR], C = v[kC];
  const double K3 = p.K_half * p.K_half * p.K_half;
  const double C3 = C * C * C;
  const double denom = K3 + C3;
  const double hill = p.w1 * 3.0 * K3 * C * C / (denom * denom);

  RhsJacobian J{};
  J.dv[kR] = {-p.k_on * u_tilde - p.k_iR, hill + p.k_off, p.k_rec};
  J.dv[kC] = {p.k_on * u_tilde, -(p.k_off + p.k_iC), 0.0};
  J.dv[kE] = {0.0, p.k_iC, -(p.k_rec + p.k_deg)};
  J.du = {-p.k_on * R, p.k_on * R, 0.0};
  return J;
}

FluxValue boundary_flux(double u_point, const Receptors& v, double secretion, const ModelParams& p,
                        double gamma_area) {
  if (!(gamma_area > 0.0)) throw Error(ErrorKind::InvalidConfig, "boundary_flux: surface area must be positive");
  const double scale = 1.0 / (p.alpha * gamma_area);
  FluxValue f;
  f.value = (secretion - p.k_on * v[kR] * u_point + p.k_off * v[kC]) * scale;
  f.d_u = -p.k_on * v[kR] * scale;
  f.d_R = -p.k_on * u_point * scale;
  f.d_C = p.k_off * scale;
  return f;
}

}  // namespace cyto
