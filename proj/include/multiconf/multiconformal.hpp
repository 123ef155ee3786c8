#pragma once

#include <vector>

#include "curvature.hpp"
#include "differentiation.hpp"
#include "templates.hpp"

namespace multiconf {

class MulticonformalFactors {
 public:
  MulticonformalFactors(GeometryPtr g, std::vector<ScalarField> f) : geom_(std::move(g)), f_(std::move(f)) {
    if (static_cast<int>(f_.size()) != geom_->num_factors())
      throw StructuralError("need exactly one multiconformal factor per product factor");
    for (size_t i = 0; i < f_.size(); ++i) {
      require_same_geometry(*geom_, f_[i].geometry());
      if (!(f_[i].min() > 0.0)) throw DomainError("multiconformal factor f_" + std::to_string(i + 1) + " is not positive");
      log_f_.push_back(f_[i].map([](double x) { return std::log(x); }));
    }
  }

  static MulticonformalFactors constant(const GeometryPtr& g, const std::vector<double>& c) {
    std::vector<ScalarField> f;
    for (double x : c) f.emplace_back(g, x);
    return MulticonformalFactors(g, std::move(f));
  }
  static MulticonformalFactors ones(const GeometryPtr& g) {
    return constant(g, std::vector<double>(g->num_factors(), 1.0));
  }

  const ProductGeometry& geometry() const { return *geom_; }
  const GeometryPtr& geometry_ptr() const { return geom_; }
  int size() const { return static_cast<int>(f_.size()); }
  const ScalarField& f(int i) const { return f_.at(i); }
  const ScalarField& log_f(int i) const { return log_f_.at(i); }
  const std::vector<ScalarField>& fields() const { return f_; }

  MulticonformalFactors scaled(int i, double c) const {
    auto f = f_;
    f.at(i) = c * f[i];
    return MulticonformalFactors(geom_, std::move(f));
  }

 private:
  GeometryPtr geom_;
  std::vector<ScalarField> f_, log_f_;
};

inline MetricField deformed_metric(const GeometryPtr& g, const MulticonformalFactors& F) {
  require_same_geometry(*g, F.geometry());
  MetricField out(g);
  for (int i = 0; i < g->num_factors(); ++i) {
    const auto& d = g->data(i);
    const int off = g->block_offset(i), mi = d.m;
    for (int a = 0; a < mi; ++a)
      for (int b = a; b < mi; ++b) {
        if (!d.pattern[a * mi + b]) continue;
        std::vector<double> v(g->num_nodes());
        const auto& fi = F.f(i);
        for (long long p = 0; p < g->num_nodes(); ++p)
          v[p] = fi[p] * fi[p] * d.g[(g->local_index(p, i) * mi + a) * mi + b];
        out.set(off + a, off + b, std::move(v));
      }
  }
  return out;
}

// First derivatives, block Laplacians and block inner products of a list of
// fields at one node.
struct Jet {
  double f[kMaxFactors];
  double grad[kMaxDim][kMaxFactors];                  // d_a f_j
  double lap[kMaxFactors][kMaxFactors];               // Delta_i f_j
  double ip[kMaxFactors][kMaxFactors][kMaxFactors];   // <grad_i f_j, grad_i f_k>_g
};

class JetEvaluator {
 public:
  JetEvaluator(const ProductGeometry& g, std::vector<const double*> fields, bool laplacians = true)
      : g_(g), v_(std::move(fields)), lap_(laplacians) {
    if (static_cast<int>(v_.size()) > kMaxFactors) throw StructuralError("too many fields for a jet");
    for (int i = 0; i < g_.num_factors(); ++i) {
      const auto& d = g_.data(i);
      const int mi = d.m;
      std::vector<char> nz(mi * mi, 0);
      for (long long k = 0; k < static_cast<long long>(d.sqrt_det.size()); ++k)
        for (int a = 0; a < mi * mi; ++a)
          if (d.ginv[k * mi * mi + a] != 0.0) nz[a] = 1;
      inz_.push_back(std::move(nz));
    }
  }

  int count() const { return static_cast<int>(v_.size()); }

  void eval(long long p, const long long* loc, Jet& J) const {
    const int n = count(), m = g_.dim(), l = g_.num_factors();
    for (int j = 0; j < n; ++j) {
      J.f[j] = v_[j][p];
      for (int a = 0; a < m; ++a) J.grad[a][j] = d1_at(g_, v_[j], p, loc, a);
    }
    for (int i = 0; i < l; ++i) {
      const auto& d = g_.data(i);
      const int off = g_.block_offset(i), mi = d.m;
      const double* gi = &d.ginv[loc[i] * mi * mi];
      const double* gam = &d.gamma[loc[i] * mi * mi * mi];
      const auto& nz = inz_[i];
      double up[kMaxDim][kMaxFactors];
      for (int j = 0; j < n; ++j)
        for (int a = 0; a < mi; ++a) {
          double s = 0.0;
          for (int b = 0; b < mi; ++b)
            if (nz[a * mi + b]) s += gi[a * mi + b] * J.grad[off + b][j];
          up[a][j] = s;
        }
      for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
          double s = 0.0;
          for (int a = 0; a < mi; ++a) s += up[a][j] * J.grad[off + a][k];
          J.ip[i][j][k] = J.ip[i][k][j] = s;
        }
      if (!lap_) continue;
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int a = 0; a < mi; ++a)
          for (int b = a; b < mi; ++b) {
            if (!nz[a * mi + b]) continue;
            double h = dmix_at(g_, v_[j], p, loc, off + a, off + b);
            for (int c = 0; c < mi; ++c) h -= gam[(c * mi + a) * mi + b] * J.grad[off + c][j];
            s += (a == b ? 1.0 : 2.0) * gi[a * mi + b] * h;
          }
        J.lap[i][j] = s;
      }
    }
  }

 private:
  const ProductGeometry& g_;
  std::vector<const double*> v_;
  bool lap_;
  std::vector<std::vector<char>> inz_;
};

inline std::vector<const double*> field_pointers(const MulticonformalFactors& F) {
  std::vector<const double*> v;
  for (int i = 0; i < F.size(); ++i) v.push_back(F.f(i).data());
  return v;
}

inline std::vector<int> factor_dims(const ProductGeometry& g) {
  std::vector<int> m;
  for (int i = 0; i < g.num_factors(); ++i) m.push_back(g.block_size(i));
  return m;
}

// The six-term rho_i at one node.
inline double rho_at(const Jet& J, const int* m, int l, int i) {
  const double fi = J.f[i];
  const double mi = m[i];
  double r = -2 * (mi - 1) * J.lap[i][i] / fi - (mi - 1) * (mi - 4) * J.ip[i][i][i] / (fi * fi);
  for (int j = 0; j < l; ++j) {
    if (j == i) continue;
    const double fj = J.f[j];
    r -= 2 * m[j] * J.lap[i][j] / fj;
    r -= 2 * (mi - 2) * m[j] * J.ip[i][i][j] / (fi * fj);
    r -= m[j] * (m[j] - 1.0) * J.ip[i][j][j] / (fj * fj);
    for (int k = 0; k < l; ++k) {
      if (k == i || k == j) continue;
      r -= double(m[j]) * m[k] * J.ip[i][j][k] / (fj * J.f[k]);
    }
  }
  return r;
}

struct RhoFields {
  std::vector<ScalarField> rho;
};

inline RhoFields rho(const MulticonformalFactors& F) {
  const auto& g = F.geometry();
  const int l = g.num_factors();
  auto m = factor_dims(g);
  RhoFields out;
  for (int i = 0; i < l; ++i) out.rho.emplace_back(F.geometry_ptr());
  JetEvaluator je(g, field_pointers(F));
  Jet J;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    for (int i = 0; i < l; ++i) out.rho[i][p] = rho_at(J, m.data(), l, i);
  });
  return out;
}

// sum_i (R_i + rho_i) / f_i^2
inline ScalarField scalar_curvature_tilde(const MulticonformalFactors& F, const CurvatureBundle& blocks) {
  const auto& g = F.geometry();
  require_same_geometry(g, *blocks.geometry);
  const int l = g.num_factors();
  auto m = factor_dims(g);
  ScalarField out(F.geometry_ptr());
  JetEvaluator je(g, field_pointers(F));
  Jet J;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    double s = 0.0;
    for (int i = 0; i < l; ++i) s += (blocks.scalar_blocks[i][p] + rho_at(J, m.data(), l, i)) / (J.f[i] * J.f[i]);
    out[p] = s;
  });
  return out;
}

// sum_a f_a^-2 grad_a phi
inline TensorField tilde_gradient(const ScalarField& phi, const MulticonformalFactors& F) {
  require_same_geometry(phi.geometry(), F.geometry());
  TensorField out(phi.geometry_ptr(), 0, 1);
  for (int a = 0; a < F.size(); ++a) {
    auto ga = block_gradient(phi, a);
    const int off = phi.geometry().block_offset(a), ma = phi.geometry().block_size(a);
    for (int c = off; c < off + ma; ++c)
      for (long long p = 0; p < phi.size(); ++p) {
        double fa = F.f(a)[p];
        out.component(c)[p] = ga.component(c)[p] / (fa * fa);
      }
  }
  return out;
}

// T^c_xy for coordinate fields x in block X and y in block Y (other
// components left zero).
inline TensorField closed_form_T(const MulticonformalFactors& F, int X, int Y) {
  const auto& g = F.geometry();
  check_factor(g, X);
  check_factor(g, Y);
  const int m = g.dim(), l = g.num_factors();
  TensorField T(F.geometry_ptr(), 2, 1);
  JetEvaluator je(g, field_pointers(F), false);
  Jet J;
  const int ox = g.block_offset(X), mx = g.block_size(X), oy = g.block_offset(Y), my = g.block_size(Y);
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    for (int x = ox; x < ox + mx; ++x)
      for (int y = oy; y < oy + my; ++y) {
        auto put = [&](int c, double v) { T.component((c * m + x) * m + y)[p] += v; };
        put(y, J.grad[x][Y] / J.f[Y]);
        put(x, J.grad[y][X] / J.f[X]);
        if (X != Y) continue;
        const auto& d = g.data(X);
        const int mi = d.m;
        const double gxy = d.g[(loc[X] * mi + (x - ox)) * mi + (y - oy)];
        if (gxy == 0.0) continue;
        for (int b = 0; b < l; ++b) {
          const auto& db = g.data(b);
          const int ob = g.block_offset(b), mb = db.m;
          const double* gi = &db.ginv[loc[b] * mb * mb];
          for (int c = 0; c < mb; ++c) {
            double up = 0.0;
            for (int e = 0; e < mb; ++e) up += gi[c * mb + e] * J.grad[ob + e][X];
            put(ob + c, -gxy * J.f[X] / (J.f[b] * J.f[b]) * up);
          }
        }
      }
  });
  return T;
}

// R^gt_j - R_j / f_j^2 per block.
inline std::vector<ScalarField> scalar_block_difference(const MulticonformalFactors& F) {
  const auto& g = F.geometry();
  const int l = g.num_factors();
  auto m = factor_dims(g);
  std::vector<ScalarField> out;
  for (int j = 0; j < l; ++j) out.emplace_back(F.geometry_ptr());
  JetEvaluator je(g, field_pointers(F));
  Jet J;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    for (int j = 0; j < l; ++j) {
      const double fj = J.f[j], mj = m[j];
      double s = 2 * J.lap[j][j] / (fj * fj * fj) - 4 * J.ip[j][j][j] / (fj * fj * fj * fj);
      for (int i = 0; i < l; ++i) {
        const double fi = J.f[i], mi = m[i];
        s -= mi * J.lap[j][i] / (fj * fj * fi);
        s -= mj * J.lap[i][j] / (fi * fi * fj);
        s += 2 * mi * J.ip[j][i][j] / (fj * fj * fj * fi);
        s += 2 * mj * J.ip[i][i][j] / (fi * fi * fi * fj);
        for (int c = 0; c < l; ++c) s -= mi * mj * J.ip[c][i][j] / (J.f[c] * J.f[c] * fi * fj);
      }
      for (int c = 0; c < l; ++c) s += mj * J.ip[c][j][j] / (J.f[c] * J.f[c] * fj * fj);
      out[j][p] = s;
    }
  });
  return out;
}

// Ric^gt_j - Ric_j as covariant 2-tensors supported on block j.
inline std::vector<TensorField> ricci_block_difference(const MulticonformalFactors& F, const CurvatureBundle& blocks) {
  const auto& g = F.geometry();
  require_same_geometry(g, *blocks.geometry);
  const int l = g.num_factors(), m = g.dim();
  auto md = factor_dims(g);
  std::vector<TensorField> out;
  for (int j = 0; j < l; ++j) out.emplace_back(F.geometry_ptr(), 2, 0);
  JetEvaluator je(g, field_pointers(F));
  Jet J;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    for (int j = 0; j < l; ++j) {
      const auto& d = g.data(j);
      const int off = g.block_offset(j), mj = d.m;
      const double* gam = &d.gamma[loc[j] * mj * mj * mj];
      const double fj = J.f[j];
      double scal = 0.0;  // coefficient of g_j
      for (int i = 0; i < l; ++i) {
        const double fi = J.f[i];
        scal -= J.lap[i][j] * fj / (fi * fi);
        scal += 2 * J.ip[i][i][j] * fj / (fi * fi * fi);
        for (int c = 0; c < l; ++c) scal -= md[i] * J.ip[c][i][j] * fj / (J.f[c] * J.f[c] * fi);
      }
      for (int c = 0; c < l; ++c) scal += J.ip[c][j][j] / (J.f[c] * J.f[c]);
      for (int a = 0; a < mj; ++a)
        for (int b = a; b < mj; ++b) {
          double v = scal * d.g[(loc[j] * mj + a) * mj + b];
          const double dja = J.grad[off + a][j], djb = J.grad[off + b][j];
          v -= 4 * dja * djb / (fj * fj);
          for (int i = 0; i < l; ++i) {
            const double* fi_data = F.f(i).data();
            double h = dmix_at(g, fi_data, p, loc, off + a, off + b);
            for (int c = 0; c < mj; ++c) h -= gam[(c * mj + a) * mj + b] * J.grad[off + c][i];
            const double fi = J.f[i];
            v += (i == j ? 2.0 / fj : 0.0) * h - md[i] * h / fi;
            v += md[i] * (J.grad[off + a][i] * djb + dja * J.grad[off + b][i]) / (fi * fj);
          }
          out[j].component((off + a) * m + off + b)[p] = v;
          out[j].component((off + b) * m + off + a)[p] = v;
        }
    }
  });
  return out;
}

}  // namespace multiconf
