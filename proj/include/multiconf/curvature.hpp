#pragma once

#include <array>
#include <vector>

#include "differentiation.hpp"
#include "metric.hpp"

namespace multiconf {

enum class CurvatureLevel { scalar, full };

struct CurvatureBundle {
  GeometryPtr geometry;
  bool has_ricci = false;
  TensorField christoffel;  // Gamma^c_ab, empty unless full
  TensorField ricci;        // empty unless full
  ScalarField scalar;
  std::vector<TensorField> ricci_blocks;  // empty unless full
  std::vector<ScalarField> scalar_blocks;
};

namespace detail {

// Brute-force Levi-Civita curvature at one node from first and second
// differences of the metric components.  Only derivatives that meet a
// structurally nonzero entry of g or g^{-1} are evaluated.
class CurvatureKernel {
 public:
  CurvatureKernel(const MetricField& metric, bool full) : g_(metric), geo_(metric.geometry()), m_(metric.dim()), full_(full) {
    // g^{-1} is dense on the connected components of the pattern graph
    int comp[kMaxDim];
    for (int a = 0; a < m_; ++a) comp[a] = a;
    bool changed = true;
    while (changed) {
      changed = false;
      for (int a = 0; a < m_; ++a)
        for (int b = 0; b < m_; ++b)
          if (g_.nonzero(a, b) && comp[a] != comp[b]) {
            int lo = std::min(comp[a], comp[b]);
            comp[a] = comp[b] = lo;
            changed = true;
          }
    }
    for (int a = 0; a < m_; ++a)
      for (int b = 0; b < m_; ++b) {
        inz_[a][b] = comp[a] == comp[b];
        if (inz_[a][b]) inz_pairs_.push_back({a, b});
      }
    for (int c = 0; c < g_.num_active(); ++c) {
      auto [a, b] = g_.active_pair(c);
      mask_.push_back((1u << a) ^ (1u << b));
    }
    slot_.assign(g_.num_active() * m_ * m_, -1);
    for (int a = 0; a < m_; ++a)
      for (int c = 0; c < m_; ++c) {
        if (!inz_[a][c]) continue;
        for (int b = 0; b < m_; ++b)
          for (int e = 0; e < m_; ++e) {
            if (!full_ && !inz_[b][e]) continue;
            need(a, e, b, c);
            need(b, c, a, e);
            need(b, e, a, c);
            need(a, c, b, e);
          }
      }
  }

  int dim() const { return m_; }

  // Fills g^{-1}, Gamma (upper, Gu[c][a][b]) and the requested contractions.
  struct Node {
    double ginv[kMaxDim * kMaxDim];
    double sqrt_det;
    double gl[kMaxDim * kMaxDim * kMaxDim];  // Gamma_{e a b}
    double gu[kMaxDim * kMaxDim * kMaxDim];  // Gamma^c_{a b}
    double scalar;
    double scalar_block[kMaxFactors];
    double ricci[kMaxDim * kMaxDim];
  };

  void eval(long long p, const long long* loc, Node& out) const {
    const int m = m_;
    g_.inverse_at(p, out.ginv, &out.sqrt_det);
    const int na = g_.num_active();
    double dg[kMaxDim * (kMaxDim * (kMaxDim + 1) / 2)];
    for (int c = 0; c < na; ++c)
      for (int x = 0; x < m; ++x) dg[c * m + x] = d1_at(geo_, g_.active_values(c).data(), p, loc, x, mask_[c]);
    double d2[kMaxDim * kMaxDim * kMaxDim * (kMaxDim + 1) / 2];
    for (size_t s = 0; s < slots_.size(); ++s) {
      auto [c, u, v] = slots_[s];
      d2[s] = dmix_at(geo_, g_.active_values(c).data(), p, loc, u, v, mask_[c]);
    }
    auto DG = [&](int a, int b, int x) {
      int c = g_.component_id(a, b);
      return c < 0 ? 0.0 : dg[c * m + x];
    };
    auto D2 = [&](int a, int b, int u, int v) {
      int c = g_.component_id(a, b);
      if (c < 0) return 0.0;
      return d2[slot_[(c * m + u) * m + v]];
    };
    for (int e = 0; e < m; ++e)
      for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
          double v = 0.5 * (DG(e, b, a) + DG(e, a, b) - DG(a, b, e));
          out.gl[(e * m + a) * m + b] = v;
          out.gl[(e * m + b) * m + a] = v;
        }
    for (int i = 0; i < m * m * m; ++i) out.gu[i] = 0.0;
    for (const auto& [c, e] : inz_pairs_) {
      const double gce = out.ginv[c * m + e];
      for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) out.gu[(c * m + a) * m + b] += gce * out.gl[(e * m + a) * m + b];
    }
    for (int c = 0; c < m; ++c)
      for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) out.gu[(c * m + b) * m + a] = out.gu[(c * m + a) * m + b];
    // R_{abce} = 1/2(g_ae,bc + g_bc,ae - g_be,ac - g_ac,be) + G_qbc G^q_ae - G_qbe G^q_ac
    auto riem = [&](int a, int b, int c, int e) {
      double r = 0.5 * (D2(a, e, b, c) + D2(b, c, a, e) - D2(b, e, a, c) - D2(a, c, b, e));
      for (int q = 0; q < m; ++q)
        r += out.gl[(q * m + b) * m + c] * out.gu[(q * m + a) * m + e] - out.gl[(q * m + b) * m + e] * out.gu[(q * m + a) * m + c];
      return r;
    };
    const int l = geo_.num_factors();
    for (int i = 0; i < l; ++i) out.scalar_block[i] = 0.0;
    out.scalar = 0.0;
    if (full_) {
      for (int b = 0; b < m; ++b)
        for (int e = b; e < m; ++e) {
          double s = 0.0;
          for (const auto& [a, c] : inz_pairs_) s += out.ginv[a * m + c] * riem(a, b, c, e);
          out.ricci[b * m + e] = out.ricci[e * m + b] = s;
        }
      for (int b = 0; b < m; ++b)
        for (int e = 0; e < m; ++e) {
          if (!inz_[b][e]) continue;
          double t = out.ginv[b * m + e] * out.ricci[b * m + e];
          out.scalar += t;
          if (geo_.block_of(b) == geo_.block_of(e)) out.scalar_block[geo_.block_of(b)] += t;
        }
      return;
    }
    for (const auto& [b, e] : inz_pairs_) {
      double s = 0.0;
      for (const auto& [a, c] : inz_pairs_) s += out.ginv[a * m + c] * riem(a, b, c, e);
      double t = out.ginv[b * m + e] * s;
      out.scalar += t;
      if (geo_.block_of(b) == geo_.block_of(e)) out.scalar_block[geo_.block_of(b)] += t;
    }
  }

 private:
  void need(int x, int y, int u, int v) {
    int c = g_.component_id(x, y);
    if (c < 0) return;
    if (u > v) std::swap(u, v);
    int& s = slot_[(c * m_ + u) * m_ + v];
    if (s >= 0) return;
    s = static_cast<int>(slots_.size());
    slot_[(c * m_ + v) * m_ + u] = s;
    slots_.push_back({c, u, v});
  }

  const MetricField& g_;
  const ProductGeometry& geo_;
  int m_;
  bool full_;
  bool inz_[kMaxDim][kMaxDim] = {};
  std::vector<std::pair<int, int>> inz_pairs_;
  std::vector<unsigned> mask_;
  std::vector<int> slot_;
  std::vector<std::array<int, 3>> slots_;
};

}  // namespace detail

inline TensorField christoffel(const MetricField& metric) {
  detail::CurvatureKernel k(metric, false);
  const auto& g = metric.geometry();
  const int m = g.dim();
  TensorField out(metric.geometry_ptr(), 2, 1);
  detail::CurvatureKernel::Node node;
  for_each_node(g, [&](long long p, const long long* loc) {
    k.eval(p, loc, node);
    for (int i = 0; i < m * m * m; ++i) out.component(i)[p] = node.gu[i];
  });
  return out;
}

inline CurvatureBundle curvature(const MetricField& metric, CurvatureLevel level = CurvatureLevel::full) {
  const bool full = level == CurvatureLevel::full;
  detail::CurvatureKernel k(metric, full);
  const auto& g = metric.geometry();
  const int m = g.dim(), l = g.num_factors();
  CurvatureBundle b;
  b.geometry = metric.geometry_ptr();
  b.has_ricci = full;
  b.scalar = ScalarField(b.geometry);
  for (int i = 0; i < l; ++i) b.scalar_blocks.emplace_back(b.geometry);
  if (full) {
    b.christoffel = TensorField(b.geometry, 2, 1);
    b.ricci = TensorField(b.geometry, 2, 0);
    for (int i = 0; i < l; ++i) b.ricci_blocks.emplace_back(b.geometry, 2, 0);
  }
  detail::CurvatureKernel::Node node;
  for_each_node(g, [&](long long p, const long long* loc) {
    k.eval(p, loc, node);
    b.scalar[p] = node.scalar;
    for (int i = 0; i < l; ++i) b.scalar_blocks[i][p] = node.scalar_block[i];
    if (!full) return;
    for (int i = 0; i < m * m * m; ++i) b.christoffel.component(i)[p] = node.gu[i];
    for (int i = 0; i < m * m; ++i) b.ricci.component(i)[p] = node.ricci[i];
    for (int i = 0; i < l; ++i) {
      const int off = g.block_offset(i), mi = g.block_size(i);
      for (int a = off; a < off + mi; ++a)
        for (int c = off; c < off + mi; ++c) b.ricci_blocks[i].component(a * m + c)[p] = node.ricci[a * m + c];
    }
  });
  return b;
}

inline ScalarField scalar_curvature(const MetricField& metric) {
  return curvature(metric, CurvatureLevel::scalar).scalar;
}

// Gamma(gt) - Gamma(g), both by brute force.
inline TensorField difference_tensor(const MetricField& g, const MetricField& gt) {
  require_same_geometry(g.geometry(), gt.geometry());
  TensorField a = christoffel(g), b = christoffel(gt);
  for (int c = 0; c < b.num_components(); ++c) {
    auto& v = b.component(c);
    const auto& u = a.component(c);
    for (size_t i = 0; i < v.size(); ++i) v[i] -= u[i];
  }
  return b;
}

// Curvature of the undeformed product metric computed factor by factor and
// broadcast; for a direct product this is exact (no cross terms).
struct FactorCurvature {
  std::vector<double> scalar;  // per factor node
  std::vector<double> ricci;   // per factor node, m_i x m_i
};

inline std::vector<FactorCurvature> factor_curvatures(const ProductGeometry& g) {
  std::vector<FactorCurvature> out;
  for (int f = 0; f < g.num_factors(); ++f) {
    auto single = make_product({g.factor(f)}, g.order());
    auto bundle = curvature(MetricField::product(single), CurvatureLevel::full);
    const int mi = single->dim();
    FactorCurvature fc;
    fc.scalar = bundle.scalar.values();
    fc.ricci.resize(single->num_nodes() * mi * mi);
    for (long long k = 0; k < single->num_nodes(); ++k)
      for (int i = 0; i < mi * mi; ++i) fc.ricci[k * mi * mi + i] = bundle.ricci.component(i)[k];
    out.push_back(std::move(fc));
  }
  return out;
}

inline CurvatureBundle product_curvature(const GeometryPtr& geom, CurvatureLevel level = CurvatureLevel::scalar) {
  const auto& g = *geom;
  auto fcs = factor_curvatures(g);
  const int m = g.dim(), l = g.num_factors();
  CurvatureBundle b;
  b.geometry = geom;
  b.has_ricci = level == CurvatureLevel::full;
  b.scalar = ScalarField(geom);
  for (int i = 0; i < l; ++i) b.scalar_blocks.emplace_back(geom);
  if (b.has_ricci) {
    b.ricci = TensorField(geom, 2, 0);
    for (int i = 0; i < l; ++i) b.ricci_blocks.emplace_back(geom, 2, 0);
  }
  for_each_node(g, [&](long long p, const long long* loc) {
    double s = 0.0;
    for (int i = 0; i < l; ++i) {
      double r = fcs[i].scalar[loc[i]];
      b.scalar_blocks[i][p] = r;
      s += r;
      if (!b.has_ricci) continue;
      const int off = g.block_offset(i), mi = g.block_size(i);
      for (int a = 0; a < mi; ++a)
        for (int c = 0; c < mi; ++c) {
          double v = fcs[i].ricci[(loc[i] * mi + a) * mi + c];
          b.ricci.component((off + a) * m + off + c)[p] = v;
          b.ricci_blocks[i].component((off + a) * m + off + c)[p] = v;
        }
    }
    b.scalar[p] = s;
  });
  return b;
}

}  // namespace multiconf
