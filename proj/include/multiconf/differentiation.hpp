#pragma once

#include <utility>

#include "fields.hpp"

namespace multiconf {

// Node-level differences of raw component data.  `loc` holds the factor-local
// indices of node p; `mask` is the parity bitmask of the component.
inline double d1_at(const ProductGeometry& g, const double* v, long long p, const long long* loc, int a, unsigned mask = 0) {
  double s = 0.0;
  for (const auto& t : g.taps(1, a, loc[g.block_of(a)])) s += t.w * parity(t.flip, mask) * v[p + t.delta];
  return s;
}

inline double d2_at(const ProductGeometry& g, const double* v, long long p, const long long* loc, int a, unsigned mask = 0) {
  double s = 0.0;
  for (const auto& t : g.taps(2, a, loc[g.block_of(a)])) s += t.w * parity(t.flip, mask) * v[p + t.delta];
  return s;
}

inline double dmix_at(const ProductGeometry& g, const double* v, long long p, const long long* loc, int a, int b,
                      unsigned mask = 0) {
  if (a == b) return d2_at(g, v, p, loc, a, mask);
  const int fa = g.block_of(a), fb = g.block_of(b);
  double s = 0.0;
  if (fa != fb) {
    for (const auto& ta : g.taps(1, a, loc[fa])) {
      double inner = 0.0;
      for (const auto& tb : g.taps(1, b, loc[fb])) inner += tb.w * parity(tb.flip, mask) * v[p + ta.delta + tb.delta];
      s += ta.w * parity(ta.flip, mask) * inner;
    }
    return s;
  }
  const unsigned outer = mask ^ (1u << b);
  for (const auto& ta : g.taps(1, a, loc[fa])) {
    double inner = 0.0;
    for (const auto& tb : g.taps(1, b, ta.local)) inner += tb.w * parity(tb.flip, mask) * v[p + ta.delta + tb.delta];
    s += ta.w * parity(ta.flip, outer) * inner;
  }
  return s;
}

inline void check_axis(const ProductGeometry& g, int axis) {
  if (axis < 0 || axis >= g.dim()) throw IndexError("axis " + std::to_string(axis) + " out of range");
}

inline void check_factor(const ProductGeometry& g, int i) {
  if (i < 0 || i >= g.num_factors()) throw IndexError("factor " + std::to_string(i) + " out of range");
}

template <class Fn>
void for_each_node(const ProductGeometry& g, Fn&& fn) {
  long long loc[kMaxFactors];
  for (long long p = 0; p < g.num_nodes(); ++p) {
    g.locals(p, loc);
    fn(p, static_cast<const long long*>(loc));
  }
}

inline ScalarField partial_derivative(const ScalarField& field, int axis) {
  const auto& g = field.geometry();
  check_axis(g, axis);
  ScalarField out(field.geometry_ptr());
  for_each_node(g, [&](long long p, const long long* loc) { out[p] = d1_at(g, field.data(), p, loc, axis); });
  return out;
}

inline ScalarField second_partial_derivative(const ScalarField& field, int a, int b) {
  const auto& g = field.geometry();
  check_axis(g, a);
  check_axis(g, b);
  ScalarField out(field.geometry_ptr());
  for_each_node(g, [&](long long p, const long long* loc) { out[p] = dmix_at(g, field.data(), p, loc, a, b); });
  return out;
}

// grad^g_i f: raised with the g_i block only.
inline TensorField block_gradient(const ScalarField& field, int i) {
  const auto& g = field.geometry();
  check_factor(g, i);
  TensorField out(field.geometry_ptr(), 0, 1);
  const int off = g.block_offset(i), mi = g.block_size(i);
  const auto& fd = g.data(i);
  for_each_node(g, [&](long long p, const long long* loc) {
    double d[kMaxDim];
    for (int a = 0; a < mi; ++a) d[a] = d1_at(g, field.data(), p, loc, off + a);
    const double* gi = &fd.ginv[loc[i] * mi * mi];
    for (int c = 0; c < mi; ++c) {
      double s = 0.0;
      for (int a = 0; a < mi; ++a) s += gi[c * mi + a] * d[a];
      out.component(off + c)[p] = s;
    }
  });
  return out;
}

// Projected covariant Hessian on factor i and its g-trace.  On (R, dt^2)
// the Laplacian is f''.
inline std::pair<TensorField, ScalarField> block_hessian_laplacian(const ScalarField& field, int i) {
  const auto& g = field.geometry();
  check_factor(g, i);
  TensorField hess(field.geometry_ptr(), 2, 0);
  ScalarField lap(field.geometry_ptr());
  const int off = g.block_offset(i), mi = g.block_size(i), m = g.dim();
  const auto& fd = g.data(i);
  for_each_node(g, [&](long long p, const long long* loc) {
    double d[kMaxDim];
    for (int a = 0; a < mi; ++a) d[a] = d1_at(g, field.data(), p, loc, off + a);
    const double* gi = &fd.ginv[loc[i] * mi * mi];
    const double* gam = &fd.gamma[loc[i] * mi * mi * mi];
    double tr = 0.0;
    for (int a = 0; a < mi; ++a)
      for (int b = a; b < mi; ++b) {
        double h = dmix_at(g, field.data(), p, loc, off + a, off + b);
        for (int c = 0; c < mi; ++c) h -= gam[(c * mi + a) * mi + b] * d[c];
        hess.component((off + a) * m + off + b)[p] = h;
        hess.component((off + b) * m + off + a)[p] = h;
        tr += (a == b ? 1.0 : 2.0) * gi[a * mi + b] * h;
      }
    lap[p] = tr;
  });
  return {std::move(hess), std::move(lap)};
}

}  // namespace multiconf
