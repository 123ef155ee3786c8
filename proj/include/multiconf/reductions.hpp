#pragma once

#include <cmath>

#include "multiconformal.hpp"

namespace multiconf {

// Textbook formulas used to cross-check the closed form in two special
// cases.  Both are written in u = log f so they share no code path with rho.

// g~ = e^{2u} g:  R~ = e^{-2u} (R - 2(m-1) Lap u - (m-1)(m-2) |du|^2)
inline ScalarField conformal_reference(const ScalarField& f, const CurvatureBundle& blocks) {
  const auto& g = f.geometry();
  require_same_geometry(g, *blocks.geometry);
  const double m = g.dim();
  const int l = g.num_factors();
  ScalarField u = f.map([](double x) { return std::log(x); });
  ScalarField out(f.geometry_ptr());
  JetEvaluator je(g, {u.data()});
  Jet J;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    double lap = 0.0, du2 = 0.0, R = 0.0;
    for (int i = 0; i < l; ++i) {
      lap += J.lap[i][0];
      du2 += J.ip[i][0][0];
      R += blocks.scalar_blocks[i][p];
    }
    out[p] = std::exp(-2 * J.f[0]) * (R - 2 * (m - 1) * lap - (m - 1) * (m - 2) * du2);
  });
  return out;
}

// Multiply warped B x_{f_1} F_1 x ... with base factor `base` (f_base = 1)
// and warping functions on the base:
//   R~ = R_B + sum_j R_j e^{-2u_j} - 2 Lap_B U - |dU|^2 - sum_j m_j |du_j|^2,
// U = sum_j m_j u_j.
inline ScalarField warped_reference(const MulticonformalFactors& F, const CurvatureBundle& blocks, int base = 0) {
  const auto& g = F.geometry();
  require_same_geometry(g, *blocks.geometry);
  const int l = g.num_factors();
  if (base < 0 || base >= l) throw IndexError("warped base factor out of range");
  if ((F.f(base) - ScalarField(F.geometry_ptr(), 1.0)).max_abs() > 1e-14) throw PreconditionError("warped reduction needs f_base == 1");
  auto m = factor_dims(g);
  ScalarField U(F.geometry_ptr(), 0.0);
  std::vector<const double*> ptrs{U.data()};
  for (int j = 0; j < l; ++j) {
    if (j == base) continue;
    for (long long p = 0; p < U.size(); ++p) U[p] += m[j] * F.log_f(j)[p];
  }
  for (int j = 0; j < l; ++j)
    if (j != base) ptrs.push_back(F.log_f(j).data());
  ScalarField out(F.geometry_ptr());
  JetEvaluator je(g, ptrs);
  Jet J;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    double r = blocks.scalar_blocks[base][p] - 2 * J.lap[base][0] - J.ip[base][0][0];
    int s = 1;
    for (int j = 0; j < l; ++j) {
      if (j == base) continue;
      r += blocks.scalar_blocks[j][p] * std::exp(-2 * J.f[s]) - m[j] * J.ip[base][s][s];
      ++s;
    }
    out[p] = r;
  });
  return out;
}

}  // namespace multiconf
