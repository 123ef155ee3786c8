#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"

namespace multiconf {

enum class AxisKind { periodic, pole, open };

// One chart axis.  Pole axes live on (0, pi) with nodes half a step off the
// ends; leaving the axis through an end re-enters the chart mirrored, which
// flips `co_flipped` axes and rotates `half_shift` by half a turn.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int nodes = 8;
  AxisKind kind = AxisKind::periodic;
  int sine_power = 0;
  std::vector<int> co_flipped;
  int half_shift = -1;

  double spacing() const {
    return kind == AxisKind::open ? (hi - lo) / (nodes - 1) : (hi - lo) / nodes;
  }
  double coord(int i) const {
    switch (kind) {
      case AxisKind::periodic: return lo + i * spacing();
      case AxisKind::pole: return lo + (i + 0.5) * spacing();
      case AxisKind::open: return lo + i * spacing();
    }
    return 0.0;
  }
};

using Point = std::vector<double>;
using MetricFn = std::function<Eigen::MatrixXd(const Point&)>;

class FactorGrid {
 public:
  std::string label;
  std::string kind;
  std::vector<Axis> axes;
  MetricFn metric_fn;
  // Globally smooth functions used by the field templates (embedding
  // coordinates on spheres, angles on tori).
  std::function<std::vector<double>(const Point&)> basis;
  // Global smooth scalar used as the profile of the shrinking construction.
  std::function<double(const Point&)> profile;
  // basis entries are angles (use cos(k.x)) or bounded coordinates
  bool basis_is_angle = true;

  int dim() const { return static_cast<int>(axes.size()); }

  long long num_nodes() const {
    long long n = 1;
    for (const auto& a : axes) n *= a.nodes;
    return n;
  }

  // row-major local index
  std::vector<int> unravel(long long local) const {
    std::vector<int> t(axes.size());
    for (int a = dim() - 1; a >= 0; --a) {
      t[a] = static_cast<int>(local % axes[a].nodes);
      local /= axes[a].nodes;
    }
    return t;
  }

  long long ravel(const std::vector<int>& t) const {
    long long idx = 0;
    for (int a = 0; a < dim(); ++a) idx = idx * axes[a].nodes + t[a];
    return idx;
  }

  Point point(long long local) const {
    auto t = unravel(local);
    Point x(axes.size());
    for (int a = 0; a < dim(); ++a) x[a] = axes[a].coord(t[a]);
    return x;
  }

  // Maps an index tuple that may step off the chart back onto grid nodes.
  // Returns the bitmask of local axes whose orientation was reversed.
  unsigned normalize(std::vector<int>& t) const {
    unsigned flip = 0;
    for (int a = 0; a < dim(); ++a) {
      const Axis& ax = axes[a];
      if (ax.kind == AxisKind::periodic) {
        t[a] = ((t[a] % ax.nodes) + ax.nodes) % ax.nodes;
      } else if (ax.kind == AxisKind::pole) {
        while (t[a] < 0 || t[a] >= ax.nodes) {
          t[a] = t[a] < 0 ? -1 - t[a] : 2 * ax.nodes - 1 - t[a];
          flip ^= 1u << a;
          for (int b : ax.co_flipped) {
            t[b] = axes[b].nodes - 1 - t[b];
            flip ^= 1u << b;
          }
          if (ax.half_shift >= 0) t[ax.half_shift] += axes[ax.half_shift].nodes / 2;
        }
      } else if (t[a] < 0 || t[a] >= ax.nodes) {
        throw IndexError("open axis stepped off the chart in factor " + label);
      }
    }
    return flip;
  }

  Eigen::MatrixXd metric_at(long long local) const { return metric_fn(point(local)); }

  void validate() const {
    if (axes.empty()) throw ConfigError("factor " + label + " has no axes");
    if (dim() > 8) throw ConfigError("factor dimension above 8 is not supported");
    for (const auto& ax : axes) {
      if (ax.nodes < 8) throw ConfigError("factor " + label + ": nodes_per_axis must be >= 8");
      if (ax.kind == AxisKind::pole && ax.half_shift >= 0 && axes[ax.half_shift].nodes % 2 != 0)
        throw ConfigError("factor " + label + ": sphere longitude needs an even node count");
    }
    const long long n = num_nodes();
    for (long long k = 0; k < n; ++k) {
      Eigen::MatrixXd g = metric_at(k);
      if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.cwiseAbs().maxCoeff()))
        throw DomainError("factor " + label + ": metric not symmetric at node " + std::to_string(k));
      Eigen::LLT<Eigen::MatrixXd> llt(g);
      if (llt.info() != Eigen::Success)
        throw SingularMetricError(k, "factor " + label + ": metric not positive definite at node " + std::to_string(k));
    }
    for (int a = 0; a < dim(); ++a) {
      if (axes[a].kind != AxisKind::periodic) continue;
      for (long long k = 0; k < n; k += std::max<long long>(1, n / 64)) {
        Point x = point(k), y = point(k);
        x[a] = axes[a].lo;
        y[a] = axes[a].hi;
        double d = (metric_fn(x) - metric_fn(y)).cwiseAbs().maxCoeff();
        if (d > 1e-10) throw DomainError("factor " + label + ": metric not periodic along axis " + std::to_string(a));
      }
    }
  }
};

// Round sphere S^m(r) in hyperspherical coordinates (psi_1..psi_{m-1}, phi).
inline FactorGrid make_sphere(int m, double r, int nodes) {
  if (m < 2) throw ConfigError("sphere dimension must be >= 2");
  FactorGrid f;
  f.label = "S" + std::to_string(m);
  f.kind = "sphere";
  const double pi = std::numbers::pi;
  for (int k = 0; k < m - 1; ++k) {
    Axis ax{0.0, pi, nodes, AxisKind::pole, m - 1 - k, {}, m - 1};
    for (int b = k + 1; b < m - 1; ++b) ax.co_flipped.push_back(b);
    f.axes.push_back(ax);
  }
  f.axes.push_back(Axis{0.0, 2 * pi, nodes, AxisKind::periodic, 0, {}, -1});
  f.metric_fn = [m, r](const Point& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
    double s = r * r;
    for (int a = 0; a < m; ++a) {
      g(a, a) = s;
      if (a < m - 1) s *= std::sin(x[a]) * std::sin(x[a]);
    }
    return g;
  };
  f.basis = [m](const Point& x) {
    std::vector<double> e(m + 1);
    double s = 1.0;
    for (int a = 0; a < m - 1; ++a) {
      e[a] = s * std::cos(x[a]);
      s *= std::sin(x[a]);
    }
    e[m - 1] = s * std::cos(x[m - 1]);
    e[m] = s * std::sin(x[m - 1]);
    return e;
  };
  f.basis_is_angle = false;
  f.profile = [](const Point& x) { return std::cos(x[0]); };
  return f;
}

inline FactorGrid make_torus_like(int m, std::vector<double> lengths, int nodes) {
  if (m < 1) throw ConfigError("torus dimension must be >= 1");
  if (lengths.empty()) lengths.assign(m, 2 * std::numbers::pi);
  if (static_cast<int>(lengths.size()) == 1 && m > 1) lengths.assign(m, lengths[0]);
  if (static_cast<int>(lengths.size()) != m) throw ConfigError("torus lengths do not match dimension");
  for (double L : lengths)
    if (!(L > 0)) throw ConfigError("torus lengths must be positive");
  FactorGrid f;
  for (int a = 0; a < m; ++a) f.axes.push_back(Axis{0.0, lengths[a], nodes, AxisKind::periodic, 0, {}, -1});
  f.basis = [lengths](const Point& x) {
    std::vector<double> e(x.size());
    for (size_t a = 0; a < x.size(); ++a) e[a] = 2 * std::numbers::pi * x[a] / lengths[a];
    return e;
  };
  f.profile = [L = lengths[0]](const Point& x) { return std::sin(2 * std::numbers::pi * x[0] / L); };
  return f;
}

inline FactorGrid make_flat_torus(int m, std::vector<double> lengths, int nodes) {
  FactorGrid f = make_torus_like(m, std::move(lengths), nodes);
  f.label = "T" + std::to_string(m);
  f.kind = "flat_torus";
  f.metric_fn = [m](const Point&) { return Eigen::MatrixXd::Identity(m, m); };
  return f;
}

// Diagonal anisotropic bump g_aa = exp(2 eps cos(sum of the other angles)).
// Not conformally flat, so its Yamabe sign can be negative.
inline FactorGrid make_bumpy_torus(int m, std::vector<double> lengths, int nodes, double eps = 0.3) {
  FactorGrid f = make_torus_like(m, std::move(lengths), nodes);
  f.label = "bumpyT" + std::to_string(m);
  f.kind = "bumpy_torus";
  auto angles = f.basis;
  f.metric_fn = [m, eps, angles](const Point& x) {
    auto th = angles(x);
    double total = 0.0;
    for (double t : th) total += t;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a) g(a, a) = m == 1 ? 1.0 : std::exp(2 * eps * std::cos(total - th[a]));
    return g;
  };
  return f;
}

// Custom built-in: flat torus times exp(2 eps cos(theta_1 + ... + theta_m)).
// Conformally flat, so its Yamabe sign is zero.
inline FactorGrid make_conformal_torus(int m, std::vector<double> lengths, int nodes, double eps = 0.3) {
  FactorGrid f = make_torus_like(m, std::move(lengths), nodes);
  f.label = "confT" + std::to_string(m);
  f.kind = "conformal_torus";
  auto angles = f.basis;
  f.metric_fn = [m, eps, angles](const Point& x) {
    double total = 0.0;
    for (double t : angles(x)) total += t;
    return Eigen::MatrixXd(std::exp(2 * eps * std::cos(total)) * Eigen::MatrixXd::Identity(m, m));
  };
  return f;
}

// Custom built-in: flat interval [lo, hi] with one-sided boundary stencils.
inline FactorGrid make_interval(double lo, double hi, int nodes) {
  FactorGrid f;
  f.label = "I";
  f.kind = "interval";
  f.axes.push_back(Axis{lo, hi, nodes, AxisKind::open, 0, {}, -1});
  f.metric_fn = [](const Point&) { return Eigen::MatrixXd::Identity(1, 1); };
  f.basis = [lo, hi](const Point& x) { return std::vector<double>{std::numbers::pi * (x[0] - lo) / (hi - lo)}; };
  f.profile = [lo, hi](const Point& x) { return std::cos(std::numbers::pi * (x[0] - lo) / (hi - lo)); };
  return f;
}

}  // namespace multiconf
