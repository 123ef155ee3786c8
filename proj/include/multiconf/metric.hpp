#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "fields.hpp"

namespace multiconf {

// In-place Cholesky of a small SPD matrix (row-major m x m); fills the
// inverse and returns sqrt(det).  Returns false when not positive definite.
inline bool invert_spd(const double* g, int m, double* ginv, double* sqrt_det) {
  double L[kMaxDim * kMaxDim] = {};
  double det = 1.0;
  for (int j = 0; j < m; ++j) {
    double s = g[j * m + j];
    for (int k = 0; k < j; ++k) s -= L[j * m + k] * L[j * m + k];
    if (!(s > 0.0)) return false;
    double d = std::sqrt(s);
    L[j * m + j] = d;
    det *= d;
    for (int i = j + 1; i < m; ++i) {
      double t = g[i * m + j];
      for (int k = 0; k < j; ++k) t -= L[i * m + k] * L[j * m + k];
      L[i * m + j] = t / d;
    }
  }
  // inverse of L, then L^-T L^-1
  double Li[kMaxDim * kMaxDim] = {};
  for (int i = 0; i < m; ++i) {
    Li[i * m + i] = 1.0 / L[i * m + i];
    for (int j = 0; j < i; ++j) {
      double s = 0.0;
      for (int k = j; k < i; ++k) s -= L[i * m + k] * Li[k * m + j];
      Li[i * m + j] = s / L[i * m + i];
    }
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = i; k < m; ++k) s += Li[k * m + i] * Li[k * m + j];
      ginv[i * m + j] = s;
      ginv[j * m + i] = s;
    }
  if (sqrt_det) *sqrt_det = det;
  return true;
}

class MetricField {
 public:
  explicit MetricField(GeometryPtr g) : geom_(std::move(g)) {
    for (auto& row : cid_) row.fill(-1);
  }

  // The undeformed product metric g_1 + ... + g_l, sampled per node.
  static MetricField product(GeometryPtr g) {
    MetricField out(g);
    for (int f = 0; f < g->num_factors(); ++f) {
      const auto& d = g->data(f);
      const int off = g->block_offset(f), mi = d.m;
      for (int a = 0; a < mi; ++a)
        for (int b = a; b < mi; ++b) {
          if (!d.pattern[a * mi + b]) continue;
          std::vector<double> v(g->num_nodes());
          for (long long p = 0; p < g->num_nodes(); ++p) v[p] = d.g[(g->local_index(p, f) * mi + a) * mi + b];
          out.set(off + a, off + b, std::move(v));
        }
    }
    return out;
  }

  const ProductGeometry& geometry() const { return *geom_; }
  const GeometryPtr& geometry_ptr() const { return geom_; }
  int dim() const { return geom_->dim(); }

  void set(int a, int b, std::vector<double> values) {
    if (a > b) std::swap(a, b);
    if (static_cast<long long>(values.size()) != geom_->num_nodes()) throw StructuralError("metric component extent mismatch");
    if (cid_[a][b] >= 0) {
      comps_[cid_[a][b]] = std::move(values);
      return;
    }
    cid_[a][b] = cid_[b][a] = static_cast<int>(comps_.size());
    comps_.push_back(std::move(values));
    pairs_.push_back({a, b});
  }

  const double* component(int a, int b) const {
    int c = cid_[a][b];
    return c < 0 ? nullptr : comps_[c].data();
  }
  bool nonzero(int a, int b) const { return cid_[a][b] >= 0; }
  int component_id(int a, int b) const { return cid_[a][b]; }
  int num_active() const { return static_cast<int>(comps_.size()); }
  std::pair<int, int> active_pair(int c) const { return pairs_[c]; }
  const std::vector<double>& active_values(int c) const { return comps_[c]; }

  double at(int a, int b, long long p) const {
    int c = cid_[a][b];
    return c < 0 ? 0.0 : comps_[c][p];
  }

  // Cross-factor components absent or identically zero.
  bool block_diagonal() const {
    for (int c = 0; c < num_active(); ++c) {
      auto [a, b] = pairs_[c];
      if (geom_->block_of(a) == geom_->block_of(b)) continue;
      for (double x : comps_[c])
        if (x != 0.0) return false;
    }
    return true;
  }

  void node_matrix(long long p, double* g) const {
    const int m = dim();
    for (int i = 0; i < m * m; ++i) g[i] = 0.0;
    for (int c = 0; c < num_active(); ++c) {
      auto [a, b] = pairs_[c];
      g[a * m + b] = g[b * m + a] = comps_[c][p];
    }
  }

  void inverse_at(long long p, double* ginv, double* sqrt_det) const {
    double g[kMaxDim * kMaxDim];
    node_matrix(p, g);
    if (!invert_spd(g, dim(), ginv, sqrt_det)) throw singular(p);
  }

  ScalarField sqrt_det() const {
    ScalarField s(geom_);
    double gi[kMaxDim * kMaxDim];
    for (long long p = 0; p < geom_->num_nodes(); ++p) inverse_at(p, gi, &s[p]);
    return s;
  }

  SingularMetricError singular(long long p) const {
    std::string where;
    for (double x : geom_->coords(p)) where += (where.empty() ? "" : ", ") + std::to_string(x);
    return SingularMetricError(p, "metric not positive definite at node " + std::to_string(p) + " (" + where + ")");
  }

  // c * g
  MetricField scaled(double c) const {
    MetricField out = *this;
    for (auto& v : out.comps_)
      for (double& x : v) x *= c;
    return out;
  }

  // g + t h for a symmetric covariant rank-2 field h
  MetricField plus(const TensorField& h, double t) const {
    require_same_geometry(*geom_, h.geometry());
    if (h.covariant() != 2 || h.contravariant() != 0) throw StructuralError("metric perturbation must be a covariant 2-tensor");
    MetricField out = *this;
    const int m = dim();
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) {
        const auto& hv = h.component(a * m + b);
        bool any = false;
        for (double x : hv)
          if (x != 0.0) {
            any = true;
            break;
          }
        if (!any) continue;
        std::vector<double> v(geom_->num_nodes());
        for (long long p = 0; p < geom_->num_nodes(); ++p) v[p] = at(a, b, p) + t * hv[p];
        out.set(a, b, std::move(v));
      }
    return out;
  }

 private:
  GeometryPtr geom_;
  std::array<std::array<int, kMaxDim>, kMaxDim> cid_{};
  std::vector<std::vector<double>> comps_;
  std::vector<std::pair<int, int>> pairs_;
};

}  // namespace multiconf
