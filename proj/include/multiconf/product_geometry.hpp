#pragma once

#include <Eigen/Dense>
#include <array>
#include <bit>
#include <memory>
#include <span>
#include <vector>

#include "factor_grid.hpp"
#include "stencil.hpp"

namespace multiconf {

constexpr int kMaxDim = 8;
constexpr int kMaxFactors = 6;

// Sign picked up by a tensor component whose index bitmask is `mask` when a
// stencil tap crosses a pole with the axis reversals recorded in `flip`.
inline double parity(unsigned flip, unsigned mask) {
  const unsigned x = flip & mask;
  return x == 0 ? 1.0 : (std::popcount(x) & 1 ? -1.0 : 1.0);
}

class ProductGeometry {
 public:
  struct Tap {
    long long delta;  // product-index offset
    int local;        // factor-local index of the tapped node
    unsigned flip;    // reversed product axes
    double w;
  };

  // Undeformed factor metric sampled on the factor grid.
  struct FactorData {
    int m = 0;
    std::vector<double> g, ginv, sqrt_det;
    std::vector<double> gamma;  // Gamma^c_ab at ((c*m)+a)*m+b
    std::vector<char> pattern;  // structural nonzeros of g (m*m)
  };

  explicit ProductGeometry(std::vector<FactorGrid> factors, int order = 8) : factors_(std::move(factors)), order_(order) {
    if (factors_.empty()) throw ConfigError("product geometry needs at least one factor");
    if (static_cast<int>(factors_.size()) > kMaxFactors) throw ConfigError("too many factors");
    if (order != 2 && order != 4 && order != 6 && order != 8) throw ConfigError("stencil order must be 2, 4, 6 or 8");
    int off = 0;
    for (auto& f : factors_) {
      f.validate();
      offset_.push_back(off);
      for (int a = 0; a < f.dim(); ++a) {
        axis_factor_.push_back(static_cast<int>(offset_.size()) - 1);
        axis_local_.push_back(a);
      }
      off += f.dim();
      size_.push_back(f.num_nodes());
    }
    m_ = off;
    if (m_ > kMaxDim) throw ConfigError("total dimension above 8 is not supported");
    stride_.assign(factors_.size(), 1);
    for (int f = static_cast<int>(factors_.size()) - 2; f >= 0; --f) stride_[f] = stride_[f + 1] * size_[f + 1];
    nodes_ = stride_[0] * size_[0];
    for (int d = 0; d < 2; ++d) tables_[d].resize(m_);
    for (int a = 0; a < m_; ++a) {
      build_taps(a, 1);
      build_taps(a, 2);
    }
    for (int f = 0; f < num_factors(); ++f) data_.push_back(build_factor_data(f));
  }

  int dim() const { return m_; }
  int order() const { return order_; }
  int num_factors() const { return static_cast<int>(factors_.size()); }
  long long num_nodes() const { return nodes_; }
  const FactorGrid& factor(int f) const { return factors_.at(f); }
  const std::vector<FactorGrid>& factors() const { return factors_; }
  int block_offset(int f) const { return offset_.at(f); }
  int block_size(int f) const { return factors_.at(f).dim(); }
  int block_of(int axis) const { return axis_factor_.at(axis); }
  int local_axis(int axis) const { return axis_local_.at(axis); }
  long long factor_stride(int f) const { return stride_[f]; }
  long long factor_size(int f) const { return size_[f]; }
  long long local_index(long long p, int f) const { return (p / stride_[f]) % size_[f]; }
  void locals(long long p, long long* out) const {
    for (int f = num_factors() - 1; f >= 0; --f) {
      out[f] = p % size_[f];
      p /= size_[f];
    }
  }
  const Axis& axis(int a) const { return factors_[axis_factor_[a]].axes[axis_local_[a]]; }
  double spacing(int a) const { return axis(a).spacing(); }
  double h_max() const {
    double h = 0.0;
    for (int a = 0; a < m_; ++a) h = std::max(h, spacing(a));
    return h;
  }
  std::vector<double> coords(long long p) const {
    std::vector<double> x;
    for (int f = 0; f < num_factors(); ++f) {
      auto pt = factors_[f].point(local_index(p, f));
      x.insert(x.end(), pt.begin(), pt.end());
    }
    return x;
  }
  bool has_open_axes() const {
    for (int a = 0; a < m_; ++a)
      if (axis(a).kind == AxisKind::open) return true;
    return false;
  }

  // Taps of d/dx_a (deriv = 1) or d^2/dx_a^2 (deriv = 2) at a node whose
  // local index in the owning factor is `local`.
  std::span<const Tap> taps(int deriv, int a, long long local) const {
    const auto& t = tables_[deriv - 1][a];
    return {t.taps.data() + t.start[local], t.taps.data() + t.start[local + 1]};
  }

  const FactorData& data(int f) const { return data_.at(f); }

 private:
  struct TapTable {
    std::vector<long long> start;
    std::vector<Tap> taps;
  };

  void build_taps(int a, int deriv) {
    const int f = axis_factor_[a];
    const int al = axis_local_[a];
    const FactorGrid& fg = factors_[f];
    const Axis& ax = fg.axes[al];
    const bool wrap = ax.kind != AxisKind::open;
    const double scale = 1.0 / std::pow(ax.spacing(), deriv);
    TapTable& tab = tables_[deriv - 1][a];
    tab.start.reserve(size_[f] + 1);
    tab.start.push_back(0);
    for (long long loc = 0; loc < size_[f]; ++loc) {
      auto t0 = fg.unravel(loc);
      auto st = make_stencil(t0[al], ax.nodes, order_, deriv, wrap);
      for (size_t k = 0; k < st.offsets.size(); ++k) {
        auto t = t0;
        t[al] += st.offsets[k];
        unsigned flip = fg.normalize(t) << offset_[f];
        long long nl = fg.ravel(t);
        tab.taps.push_back(Tap{(nl - loc) * stride_[f], static_cast<int>(nl), flip, st.weights[k] * scale});
      }
      tab.start.push_back(static_cast<long long>(tab.taps.size()));
    }
  }

  FactorData build_factor_data(int f) const {
    const FactorGrid& fg = factors_[f];
    const int m = fg.dim();
    const long long n = size_[f];
    FactorData d;
    d.m = m;
    d.g.resize(n * m * m);
    d.ginv.resize(n * m * m);
    d.sqrt_det.resize(n);
    d.gamma.assign(n * m * m * m, 0.0);
    d.pattern.assign(m * m, 0);
    for (long long k = 0; k < n; ++k) {
      Eigen::MatrixXd g = fg.metric_at(k);
      g = 0.5 * (g + g.transpose());
      Eigen::LLT<Eigen::MatrixXd> llt(g);
      Eigen::MatrixXd gi = llt.solve(Eigen::MatrixXd::Identity(m, m));
      double det = 1.0;
      for (int a = 0; a < m; ++a) det *= llt.matrixL()(a, a);
      d.sqrt_det[k] = det;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          d.g[(k * m + a) * m + b] = g(a, b);
          d.ginv[(k * m + a) * m + b] = gi(a, b);
          if (g(a, b) != 0.0) d.pattern[a * m + b] = 1;
        }
    }
    // dg[(a*m+b)*m+c] = d_c g_ab, by the same stencils with tensor parity
    const int off = offset_[f];
    std::vector<double> dg(m * m * m);
    std::vector<double> comp(n);
    std::vector<std::vector<double>> dcomp(m * m * m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        if (!d.pattern[a * m + b]) continue;
        for (long long k = 0; k < n; ++k) comp[k] = d.g[(k * m + a) * m + b];
        unsigned mask = (1u << (off + a)) ^ (1u << (off + b));
        for (int c = 0; c < m; ++c) {
          auto& out = dcomp[(a * m + b) * m + c];
          out.resize(n);
          for (long long k = 0; k < n; ++k) {
            double s = 0.0;
            for (const Tap& t : taps(1, off + c, k)) s += t.w * parity(t.flip, mask) * comp[t.local];
            out[k] = s;
          }
        }
      }
    for (long long k = 0; k < n; ++k) {
      auto D = [&](int a, int b, int c) {
        const auto& v = dcomp[(a * m + b) * m + c];
        return v.empty() ? 0.0 : v[k];
      };
      std::vector<double> low(m * m * m);
      for (int e = 0; e < m; ++e)
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) low[(e * m + a) * m + b] = 0.5 * (D(e, b, a) + D(e, a, b) - D(a, b, e));
      for (int c = 0; c < m; ++c)
        for (int a = 0; a < m; ++a)
          for (int b = a; b < m; ++b) {
            double s = 0.0;
            for (int e = 0; e < m; ++e) s += d.ginv[(k * m + c) * m + e] * low[(e * m + a) * m + b];
            d.gamma[((k * m + c) * m + a) * m + b] = s;
            d.gamma[((k * m + c) * m + b) * m + a] = s;
          }
    }
    return d;
  }

  std::vector<FactorGrid> factors_;
  int order_;
  int m_ = 0;
  long long nodes_ = 0;
  std::vector<int> offset_, axis_factor_, axis_local_;
  std::vector<long long> stride_, size_;
  std::array<std::vector<TapTable>, 2> tables_;
  std::vector<FactorData> data_;
};

using GeometryPtr = std::shared_ptr<const ProductGeometry>;

inline GeometryPtr make_product(std::vector<FactorGrid> factors, int order = 8) {
  return std::make_shared<const ProductGeometry>(std::move(factors), order);
}

}  // namespace multiconf
