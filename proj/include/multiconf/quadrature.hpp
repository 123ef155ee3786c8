#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "fields.hpp"

namespace multiconf {

// Fejer's first rule on (0, pi): nodes (j+1/2)pi/n, integrates g(theta) sin(theta).
inline std::vector<double> fejer_weights(int n) {
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) {
    double th = (j + 0.5) * std::numbers::pi / n;
    double s = 0.0;
    for (int l = 1; l <= n / 2; ++l) s += std::cos(2 * l * th) / (4.0 * l * l - 1.0);
    w[j] = 2.0 / n * (1.0 - 2.0 * s);
  }
  return w;
}

inline std::vector<double> axis_weights(const Axis& ax) {
  const int n = ax.nodes;
  const double h = ax.spacing();
  std::vector<double> w(n, h);
  if (ax.kind == AxisKind::pole && ax.sine_power % 2 == 1) {
    // odd powers of sin are not periodic-smooth under reflection; Fejer
    // handles the sin factor exactly, the rest stays in the integrand
    auto fw = fejer_weights(n);
    const double scale = (ax.hi - ax.lo) / std::numbers::pi;
    for (int j = 0; j < n; ++j) w[j] = scale * fw[j] / std::sin(ax.coord(j));
  } else if (ax.kind == AxisKind::open) {
    std::fill(w.begin(), w.end(), 0.0);
    int simpson_end = (n % 2 == 1) ? n - 1 : n - 4;
    for (int j = 0; j < simpson_end; j += 2) {
      w[j] += h / 3;
      w[j + 1] += 4 * h / 3;
      w[j + 2] += h / 3;
    }
    if (n % 2 == 0) {
      const int s = n - 4;
      w[s] += 3 * h / 8;
      w[s + 1] += 9 * h / 8;
      w[s + 2] += 9 * h / 8;
      w[s + 3] += 3 * h / 8;
    }
  }
  return w;
}

class QuadratureRule {
 public:
  explicit QuadratureRule(GeometryPtr g) : geom_(std::move(g)) {
    for (int a = 0; a < geom_->dim(); ++a) axis_w_.push_back(axis_weights(geom_->axis(a)));
    for (int f = 0; f < geom_->num_factors(); ++f) {
      const auto& fg = geom_->factor(f);
      const long long n = fg.num_nodes();
      std::vector<double> w(n), wd(n);
      for (long long k = 0; k < n; ++k) {
        auto t = fg.unravel(k);
        double s = 1.0;
        for (int a = 0; a < fg.dim(); ++a) s *= axis_w_[geom_->block_offset(f) + a][t[a]];
        w[k] = s;
        wd[k] = s * geom_->data(f).sqrt_det[k];
      }
      chart_w_.push_back(std::move(w));
      vol_w_.push_back(std::move(wd));
    }
  }

  const ProductGeometry& geometry() const { return *geom_; }
  const std::vector<double>& axis_weights_of(int a) const { return axis_w_.at(a); }

  // chart weight times sqrt(det g) of the product metric
  double node_weight(long long p) const {
    double w = 1.0;
    for (int f = geom_->num_factors() - 1; f >= 0; --f) {
      long long n = geom_->factor_size(f);
      w *= vol_w_[f][p % n];
      p /= n;
    }
    return w;
  }
  double chart_weight(long long p) const {
    double w = 1.0;
    for (int f = geom_->num_factors() - 1; f >= 0; --f) {
      long long n = geom_->factor_size(f);
      w *= chart_w_[f][p % n];
      p /= n;
    }
    return w;
  }
  const std::vector<double>& factor_volume_weights(int f) const { return vol_w_.at(f); }

  ScalarField volume_density() const {
    ScalarField s(geom_);
    for (long long p = 0; p < geom_->num_nodes(); ++p) {
      double d = 1.0;
      for (int f = 0; f < geom_->num_factors(); ++f) d *= geom_->data(f).sqrt_det[geom_->local_index(p, f)];
      s[p] = d;
    }
    return s;
  }

  double integrate(const ScalarField& field) const {
    require_same_geometry(*geom_, field.geometry());
    double s = 0.0;
    for (long long p = 0; p < geom_->num_nodes(); ++p) s += node_weight(p) * field[p];
    return s;
  }

  // integral against an explicit density (e.g. sqrt det of a deformed metric)
  double integrate_with_density(const ScalarField& field, const ScalarField& density) const {
    require_same_geometry(*geom_, field.geometry());
    require_same_geometry(*geom_, density.geometry());
    double s = 0.0;
    for (long long p = 0; p < geom_->num_nodes(); ++p) s += chart_weight(p) * density[p] * field[p];
    return s;
  }

  double volume() const {
    double v = 1.0;
    for (const auto& w : vol_w_) {
      double s = 0.0;
      for (double x : w) s += x;
      v *= s;
    }
    return v;
  }

 private:
  GeometryPtr geom_;
  std::vector<std::vector<double>> axis_w_;
  std::vector<std::vector<double>> chart_w_, vol_w_;
};

inline double integrate(const ScalarField& field, const QuadratureRule& rule) { return rule.integrate(field); }

}  // namespace multiconf
