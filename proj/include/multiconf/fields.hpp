#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "product_geometry.hpp"

namespace multiconf {

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GeometryPtr g, double value = 0.0) : geom_(std::move(g)), v_(geom_->num_nodes(), value) {}
  ScalarField(GeometryPtr g, std::vector<double> values) : geom_(std::move(g)), v_(std::move(values)) {
    if (static_cast<long long>(v_.size()) != geom_->num_nodes())
      throw StructuralError("scalar field extent does not match its grid");
  }

  static ScalarField from_function(GeometryPtr g, const std::function<double(const std::vector<double>&)>& fn) {
    ScalarField s(g);
    for (long long p = 0; p < g->num_nodes(); ++p) s.v_[p] = fn(g->coords(p));
    return s;
  }

  const ProductGeometry& geometry() const { return *geom_; }
  const GeometryPtr& geometry_ptr() const { return geom_; }
  long long size() const { return static_cast<long long>(v_.size()); }
  double operator[](long long i) const { return v_[i]; }
  double& operator[](long long i) { return v_[i]; }
  const double* data() const { return v_.data(); }
  double* data() { return v_.data(); }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  double min() const { return *std::min_element(v_.begin(), v_.end()); }
  double max() const { return *std::max_element(v_.begin(), v_.end()); }
  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  template <class Fn>
  ScalarField map(Fn fn) const {
    ScalarField out(geom_);
    for (size_t i = 0; i < v_.size(); ++i) out.v_[i] = fn(v_[i]);
    return out;
  }

 private:
  GeometryPtr geom_;
  std::vector<double> v_;
};

inline void require_same_geometry(const ProductGeometry& a, const ProductGeometry& b) {
  if (&a != &b) throw StructuralError("fields live on different geometries");
}

inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_geometry(a.geometry(), b.geometry());
  ScalarField out(a.geometry_ptr());
  for (long long i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_geometry(a.geometry(), b.geometry());
  ScalarField out(a.geometry_ptr());
  for (long long i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline ScalarField operator*(double c, const ScalarField& a) { return a.map([c](double x) { return c * x; }); }

// Dense tensor components; contravariant indices come first in the flat
// component index.
class TensorField {
 public:
  TensorField() = default;
  TensorField(GeometryPtr g, int covariant, int contravariant)
      : geom_(std::move(g)), cov_(covariant), con_(contravariant) {
    int n = 1;
    for (int r = 0; r < cov_ + con_; ++r) n *= geom_->dim();
    comps_.assign(n, std::vector<double>(geom_->num_nodes(), 0.0));
  }

  const ProductGeometry& geometry() const { return *geom_; }
  const GeometryPtr& geometry_ptr() const { return geom_; }
  int covariant() const { return cov_; }
  int contravariant() const { return con_; }
  int rank() const { return cov_ + con_; }
  int num_components() const { return static_cast<int>(comps_.size()); }

  int index(std::initializer_list<int> idx) const {
    if (static_cast<int>(idx.size()) != rank()) throw IndexError("tensor index arity mismatch");
    int c = 0;
    for (int i : idx) {
      if (i < 0 || i >= geom_->dim()) throw IndexError("tensor index out of range");
      c = c * geom_->dim() + i;
    }
    return c;
  }
  std::vector<double>& component(int c) { return comps_.at(c); }
  const std::vector<double>& component(int c) const { return comps_.at(c); }
  double operator()(std::initializer_list<int> idx, long long node) const { return comps_[index(idx)][node]; }
  double& operator()(std::initializer_list<int> idx, long long node) { return comps_[index(idx)][node]; }

  ScalarField component_field(std::initializer_list<int> idx) const { return ScalarField(geom_, comps_[index(idx)]); }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : comps_)
      for (double x : c) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  GeometryPtr geom_;
  int cov_ = 0, con_ = 0;
  std::vector<std::vector<double>> comps_;
};

}  // namespace multiconf
