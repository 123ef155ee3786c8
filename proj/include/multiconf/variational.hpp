#pragma once

#include <Eigen/Sparse>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "identities.hpp"

namespace multiconf {

inline double p_m(int m) {
  if (m < 3) throw DomainError("the normalized Einstein-Hilbert functional needs m >= 3");
  return 2.0 * m / (m - 2.0);
}

// chart weights of `rule` times sqrt det of the given metric
inline double volume_of(const MetricField& metric, const QuadratureRule& rule) {
  return rule.integrate_with_density(ScalarField(metric.geometry_ptr(), 1.0), metric.sqrt_det());
}

inline double einstein_hilbert(const ScalarField& R, const ScalarField& density, const QuadratureRule& rule) {
  const int m = rule.geometry().dim();
  const double S = rule.integrate_with_density(R, density);
  const double V = rule.integrate_with_density(ScalarField(R.geometry_ptr(), 1.0), density);
  return S / std::pow(V, 2.0 / p_m(m));
}

inline double einstein_hilbert(const MetricField& metric, const QuadratureRule& rule) {
  require_same_geometry(metric.geometry(), rule.geometry());
  p_m(metric.dim());
  return einstein_hilbert(scalar_curvature(metric), metric.sqrt_det(), rule);
}

// relative weighted variance of a field; scale floor 1 keeps the flat case
// absolute
inline double relative_variance(const ScalarField& f, const QuadratureRule& rule) {
  const double V = rule.volume();
  const double mean = rule.integrate(f) / V;
  auto d = f.map([mean](double x) { return (x - mean) * (x - mean); });
  return rule.integrate(d) / V / std::max(1.0, mean * mean);
}

inline double mean_of(const ScalarField& f, const QuadratureRule& rule) { return rule.integrate(f) / rule.volume(); }

// <h, T>_g for covariant 2-tensors at node p
inline double tensor_inner(const double* ginv, int m, const TensorField& h, const TensorField& T, long long p) {
  double s = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double hab = h.component(a * m + b)[p];
      if (hab == 0.0) continue;
      for (int c = 0; c < m; ++c) {
        const double gac = ginv[a * m + c];
        if (gac == 0.0) continue;
        for (int d = 0; d < m; ++d) s += hab * gac * ginv[b * m + d] * T.component(c * m + d)[p];
      }
    }
  return s;
}

struct FirstVariation {
  double fd = 0.0;          // central difference at delta
  double fd_half = 0.0;     // central difference at delta / 2
  double richardson = 0.0;  // (4 fd_half - fd) / 3
  double formula = 0.0;
  double residual = 0.0;    // richardson - formula
  double relative = 0.0;    // |residual| / max(|formula|, |richardson|)
  double scale = 0.0;       // V^{-2/p} int |<h, (R/m) g>| dmu, for zero tests
  double constancy = 0.0;   // relative variance of R^g
  bool constant_scalar = false;
};

// d/dt E(g + t h) at t = 0 against
//   -V^{-2/p} int <h, Ric - (R/m) g> dmu,
// which is the first variation at constant scalar curvature.
inline FirstVariation first_variation_check(const MetricField& g, const TensorField& h, const QuadratureRule& rule,
                                            double delta = 1e-4, double constancy_tol = 1e-6) {
  require_same_geometry(g.geometry(), rule.geometry());
  const int m = g.dim();
  const double pm = p_m(m);
  FirstVariation r;
  auto E = [&](double t) { return einstein_hilbert(g.plus(h, t), rule); };
  r.fd = (E(delta) - E(-delta)) / (2 * delta);
  r.fd_half = (E(delta / 2) - E(-delta / 2)) / delta;
  r.richardson = (4 * r.fd_half - r.fd) / 3;
  auto bundle = curvature(g, CurvatureLevel::full);
  const auto dens = g.sqrt_det();
  r.constancy = relative_variance(bundle.scalar, rule);
  r.constant_scalar = r.constancy <= constancy_tol;
  ScalarField integrand(g.geometry_ptr()), trace_part(g.geometry_ptr());
  double ginv[kMaxDim * kMaxDim], sd;
  TensorField gt(g.geometry_ptr(), 2, 0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (g.nonzero(a, b))
        for (long long p = 0; p < g.geometry().num_nodes(); ++p) gt.component(a * m + b)[p] = g.at(a, b, p);
  for (long long p = 0; p < g.geometry().num_nodes(); ++p) {
    g.inverse_at(p, ginv, &sd);
    const double R = bundle.scalar[p];
    trace_part[p] = (R / m) * tensor_inner(ginv, m, h, gt, p);
    integrand[p] = tensor_inner(ginv, m, h, bundle.ricci, p) - trace_part[p];
  }
  const double V = rule.integrate_with_density(ScalarField(g.geometry_ptr(), 1.0), dens);
  r.formula = -rule.integrate_with_density(integrand, dens) / std::pow(V, 2.0 / pm);
  r.scale = rule.integrate_with_density(trace_part.map([](double x) { return std::abs(x); }), dens) / std::pow(V, 2.0 / pm);
  r.residual = r.richardson - r.formula;
  const double sc = std::max(std::abs(r.formula), std::abs(r.richardson));
  r.relative = sc > 0 ? std::abs(r.residual) / sc : 0.0;
  return r;
}

// Smooth symmetric perturbation
//   sum_i (c_i + phi_i) g_i + sum_k chi_k d psi_k (x) d psi_k
// from seeded template fields, c_i uniform in (-1, 1).  With `compatible`
// the rank-one terms are cut to the factor blocks so h stays tangent to the
// block-diagonal metrics.
inline TensorField random_direction(const GeometryPtr& gp, std::uint64_t seed, bool compatible = true, int rank_one_terms = 2,
                                    int max_freq = 1) {
  const auto& g = *gp;
  const int m = g.dim();
  TensorField h(gp, 2, 0);
  auto metric = MetricField::product(gp);
  Rng rng(mix_seed(seed, 99));
  FieldTemplate t;
  t.kind = TemplateKind::trig_poly;
  t.amplitude = 1.0;
  t.max_freq = max_freq;
  for (int i = 0; i < g.num_factors(); ++i) {
    const double c = rng.uniform(-1, 1);
    t.seed = mix_seed(seed, 100 + i);
    auto phi = trig_polynomial(gp, t);
    const int off = g.block_offset(i), mi = g.block_size(i);
    for (int a = off; a < off + mi; ++a)
      for (int b = off; b < off + mi; ++b)
        if (metric.nonzero(a, b))
          for (long long p = 0; p < g.num_nodes(); ++p) h.component(a * m + b)[p] += (c + phi[p]) * metric.at(a, b, p);
  }
  for (int k = 1; k <= rank_one_terms; ++k) {
    t.seed = mix_seed(seed, 2 * k);
    auto chi = trig_polynomial(gp, t);
    t.seed = mix_seed(seed, 2 * k + 1);
    auto psi = trig_polynomial(gp, t);
    std::vector<ScalarField> d;
    for (int a = 0; a < m; ++a) d.push_back(partial_derivative(psi, a));
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        if (compatible && g.block_of(a) != g.block_of(b)) continue;
        for (long long p = 0; p < g.num_nodes(); ++p) h.component(a * m + b)[p] += chi[p] * d[a][p] * d[b][p];
      }
  }
  return h;
}

struct Criticality {
  bool critical = false;
  double c = 0.0;
  std::vector<double> per_factor;  // mean of R_i / m_i
  double residual = 0.0;           // worst relative variance / spread
};

// R_i / m_i equal to one constant for all i
inline Criticality criticality_multiconformal(const MetricField& g, const QuadratureRule& rule, double tol = 1e-6) {
  auto b = curvature(g, CurvatureLevel::scalar);
  const auto& geo = g.geometry();
  Criticality c;
  double lo = 1e300, hi = -1e300, var = 0.0;
  for (int i = 0; i < geo.num_factors(); ++i) {
    auto q = (1.0 / geo.block_size(i)) * b.scalar_blocks[i];
    double mu = mean_of(q, rule);
    c.per_factor.push_back(mu);
    lo = std::min(lo, mu);
    hi = std::max(hi, mu);
    var = std::max(var, relative_variance(q, rule));
  }
  const double spread = (hi - lo) / std::max(1.0, std::abs(hi));
  c.residual = std::max(var, spread);
  c.critical = var <= tol && spread <= std::sqrt(tol);
  c.c = 0.5 * (lo + hi);
  return c;
}

// Ric_i = c g_i for one c
inline Criticality criticality_metperp(const MetricField& g, const QuadratureRule& rule, double tol = 1e-6) {
  auto b = curvature(g, CurvatureLevel::full);
  const auto& geo = g.geometry();
  const int m = g.dim();
  Criticality c;
  double lo = 1e300, hi = -1e300, worst = 0.0;
  double ginv[kMaxDim * kMaxDim], sd;
  for (int i = 0; i < geo.num_factors(); ++i) {
    const int off = geo.block_offset(i), mi = geo.block_size(i);
    auto q = (1.0 / mi) * b.scalar_blocks[i];
    double ci = mean_of(q, rule);
    c.per_factor.push_back(ci);
    lo = std::min(lo, ci);
    hi = std::max(hi, ci);
    // |Ric_i - c_i g_i|_g^2 integrated, relative to |c_i g_i|^2 = c_i^2 m_i
    ScalarField dev(g.geometry_ptr());
    for (long long p = 0; p < geo.num_nodes(); ++p) {
      g.inverse_at(p, ginv, &sd);
      double s = 0.0;
      for (int a = off; a < off + mi; ++a)
        for (int bb = off; bb < off + mi; ++bb)
          for (int cc = off; cc < off + mi; ++cc)
            for (int d = off; d < off + mi; ++d) {
              double x = b.ricci.component(a * m + bb)[p] - ci * g.at(a, bb, p);
              double y = b.ricci.component(cc * m + d)[p] - ci * g.at(cc, d, p);
              s += ginv[a * m + cc] * ginv[bb * m + d] * x * y;
            }
      dev[p] = s;
    }
    worst = std::max(worst, mean_of(dev, rule) / std::max(1.0, ci * ci * mi));
  }
  const double spread = (hi - lo) / std::max(1.0, std::abs(hi));
  c.residual = std::max(worst, spread);
  c.critical = worst <= tol && spread <= std::sqrt(tol);
  c.c = 0.5 * (lo + hi);
  return c;
}

// ---------------------------------------------------------------------------
// conformal Laplacian ground state on one factor

struct GroundState {
  double lambda0 = 0.0;
  ScalarField v;  // on the single-factor geometry, min v = 1
  double rayleigh = 0.0;
  int iterations = 0;
  double tolerance = 0.0;
};

// Flux-form discretization of -a Delta + R on a factor with diagonal metric:
// K u . u = sum over faces a sqrt(g) g^{kk} (du)^2 (face metric evaluated at
// the face midpoint) + sum R u^2 sqrt(g), mass M = sqrt(g) dV.  Faces on a
// pole carry zero area.  Smallest eigenpair of K u = lambda M u by shifted
// inverse iteration; the shift min R - 1 lies strictly below the spectrum.
inline GroundState conformal_ground_eigen(const FactorGrid& factor, int order = 8, double tol = 1e-8, int max_iter = 500) {
  const int m = factor.dim();
  if (m < 3) throw DomainError("conformal Laplacian ground state needs m >= 3; use the Gauss-Bonnet value for surfaces");
  factor.validate();
  auto single = make_product({factor}, order);
  const auto& d = single->data(0);
  const long long n = factor.num_nodes();
  for (long long k = 0; k < n; ++k)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (a != b && d.g[k * m * m + a * m + b] != 0.0) throw StructuralError("ground state solver expects a diagonal metric");
  auto fc = factor_curvatures(*single);
  const auto& R = fc[0].scalar;
  const double coef = 4.0 * (m - 1) / (m - 2);
  double cell = 1.0;
  for (const auto& ax : factor.axes) cell *= ax.spacing();

  std::vector<Eigen::Triplet<double>> K, Mt;
  Eigen::VectorXd mass(n);
  for (long long k = 0; k < n; ++k) {
    mass[k] = d.sqrt_det[k] * cell;
    K.emplace_back(k, k, R[k] * mass[k]);
  }
  for (long long k = 0; k < n; ++k) {
    auto t = factor.unravel(k);
    for (int a = 0; a < m; ++a) {
      const auto& ax = factor.axes[a];
      if (ax.kind != AxisKind::periodic && t[a] == ax.nodes - 1) continue;
      auto tn = t;
      tn[a] = (t[a] + 1) % ax.nodes;
      const long long kn = factor.ravel(tn);
      Point x = factor.point(k);
      x[a] += 0.5 * ax.spacing();
      Eigen::MatrixXd gf = factor.metric_fn(x);
      double sq = std::sqrt(std::max(0.0, gf.diagonal().prod()));
      double w = coef * sq / gf(a, a) * cell / (ax.spacing() * ax.spacing());
      K.emplace_back(k, k, w);
      K.emplace_back(kn, kn, w);
      K.emplace_back(k, kn, -w);
      K.emplace_back(kn, k, -w);
    }
  }
  Eigen::SparseMatrix<double> Km(n, n);
  Km.setFromTriplets(K.begin(), K.end());
  const double sigma = *std::min_element(R.begin(), R.end()) - 1.0;
  Eigen::SparseMatrix<double> A = Km;
  for (long long k = 0; k < n; ++k) A.coeffRef(k, k) -= sigma * mass[k];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw NumericalError("ground state factorization failed", 0.0);

  Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  auto rq = [&](const Eigen::VectorXd& x) { return x.dot(Km * x) / x.dot(mass.cwiseProduct(x)); };
  double lam = rq(u), prev = lam;
  GroundState gs;
  gs.tolerance = tol;
  int it = 0;
  for (; it < max_iter; ++it) {
    Eigen::VectorXd rhs = mass.cwiseProduct(u);
    u = solver.solve(rhs);
    u /= std::sqrt(u.dot(mass.cwiseProduct(u)));
    lam = rq(u);
    if (it > 0 && std::abs(lam - prev) <= tol * std::max(1.0, std::abs(lam))) break;
    prev = lam;
  }
  if (it == max_iter) throw NumericalError("ground state iteration did not converge", std::abs(lam - prev));
  if (u.sum() < 0) u = -u;
  if (!(u.minCoeff() > 0)) throw NumericalError("ground state eigenfunction changes sign", u.minCoeff());
  u /= u.minCoeff();
  gs.lambda0 = lam;
  gs.rayleigh = rq(u);
  gs.iterations = it + 1;
  gs.v = ScalarField(single, std::vector<double>(u.data(), u.data() + n));
  return gs;
}

struct SurfaceYamabe {
  double integral = 0.0;  // int R dmu
  int chi = 0;
  double mu = 0.0;        // 4 pi chi
};

inline SurfaceYamabe mu_2d(const FactorGrid& factor, int order = 8, double tol = 0.05) {
  if (factor.dim() != 2) throw DomainError("Gauss-Bonnet Yamabe value applies to surfaces only");
  factor.validate();
  auto single = make_product({factor}, order);
  auto fc = factor_curvatures(*single);
  QuadratureRule rule(single);
  SurfaceYamabe s;
  s.integral = rule.integrate(ScalarField(single, fc[0].scalar));
  const double x = s.integral / (4 * std::numbers::pi);
  s.chi = static_cast<int>(std::lround(x));
  if (std::abs(x - s.chi) > tol)
    throw NumericalError("Euler characteristic not resolved on this grid (int R / 4 pi = " + std::to_string(x) + ")", std::abs(x - s.chi));
  s.mu = 4 * std::numbers::pi * s.chi;
  return s;
}

// ---------------------------------------------------------------------------
// trichotomy

struct FactorSign {
  std::string label;
  int dim = 0;
  int mu_sign = 0;
  std::optional<double> lambda0;  // m >= 3
  std::optional<double> mu;       // surfaces: 4 pi chi
  double min_scalar = 0.0;
};

struct TrichotomyReport {
  int case_id = 0;
  std::vector<FactorSign> factors;
  std::optional<std::vector<double>> witness;
  double witness_min_scalar = 0.0;
};

inline int case_from_signs(const std::vector<int>& s) {
  bool pos = false, neg = false;
  for (int x : s) {
    pos |= x > 0;
    neg |= x < 0;
  }
  return pos ? 1 : (neg ? 3 : 2);
}

inline TrichotomyReport classify_trichotomy(const ProductGeometry& geom, double zero_tol = 1e-6) {
  TrichotomyReport r;
  const int l = geom.num_factors();
  std::vector<int> signs;
  for (int i = 0; i < l; ++i) {
    const auto& f = geom.factor(i);
    if (f.dim() < 2) throw PreconditionError("factor " + f.label + " has dimension 1; the trichotomy needs m_i >= 2 for all i");
    FactorSign s;
    s.label = f.label;
    s.dim = f.dim();
    auto single = make_product({f}, geom.order());
    auto fc = factor_curvatures(*single);
    s.min_scalar = *std::min_element(fc[0].scalar.begin(), fc[0].scalar.end());
    if (f.dim() == 2) {
      auto y = mu_2d(f, geom.order());
      s.mu = y.mu;
      s.mu_sign = (y.chi > 0) - (y.chi < 0);
    } else {
      auto gs = conformal_ground_eigen(f, geom.order());
      s.lambda0 = gs.lambda0;
      s.mu_sign = std::abs(gs.lambda0) <= zero_tol ? 0 : (gs.lambda0 > 0 ? 1 : -1);
    }
    signs.push_back(s.mu_sign);
    r.factors.push_back(s);
  }
  r.case_id = case_from_signs(signs);
  if (r.case_id == 1) {
    // c_i = 1 on a positive factor with R_i > 0, double the others until
    // min sum R_j / c_j^2 > 0 (the minimum over a product is separable)
    for (int i = 0; i < l; ++i) {
      if (signs[i] <= 0 || r.factors[i].min_scalar <= 0) continue;
      std::vector<double> c(l, 1.0);
      for (int it = 0; it < 200; ++it) {
        double s = 0.0;
        for (int j = 0; j < l; ++j) s += r.factors[j].min_scalar / (c[j] * c[j]);
        if (s > 0) {
          r.witness = c;
          r.witness_min_scalar = s;
          break;
        }
        for (int j = 0; j < l; ++j)
          if (j != i) c[j] *= 2;
      }
      if (r.witness) break;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// shrinking one factor

struct ShrinkRow {
  double eps = 0.0;
  double E_decomposed = 0.0;
  double E_direct = 0.0;
  double scaled_difference = 0.0;  // |direct - decomposed| eps^{2(1 - m_i/m)}
};

struct ShrinkResult {
  int i = 0;
  double A = 0.0, B = 0.0;  // E(eps) = eps^{2(m_i/m-1)} A + eps^{2 m_i/m} B
  double hypothesis = 0.0;  // int (R_i + rho_i)/f_i^2 prod f^m
  double exponent = 0.0;
  std::vector<ShrinkRow> rows;
  double slope = 0.0;  // least squares log|E| vs log eps over the fitted tail
  int fitted = 0;
};

struct ShrinkIntegrals {
  std::vector<double> per_factor;  // int (R_j + rho_j)/f_j^2 prod f^m dmu
  double volume = 0.0;             // int prod f^m dmu
};

inline ShrinkIntegrals shrink_integrals(const MulticonformalFactors& F, const CurvatureBundle& blocks, const QuadratureRule& rule) {
  const auto& g = F.geometry();
  const int l = g.num_factors();
  auto m = factor_dims(g);
  ShrinkIntegrals s;
  s.per_factor.assign(l, 0.0);
  JetEvaluator je(g, field_pointers(F));
  Jet J;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    double w = rule.node_weight(p);
    for (int j = 0; j < l; ++j) w *= std::pow(J.f[j], m[j]);
    s.volume += w;
    for (int j = 0; j < l; ++j) s.per_factor[j] += w * (blocks.scalar_blocks[j][p] + rho_at(J, m.data(), l, j)) / (J.f[j] * J.f[j]);
  });
  return s;
}

inline double lemma_hypothesis(const MulticonformalFactors& F, int i, const CurvatureBundle& blocks, const QuadratureRule& rule) {
  return shrink_integrals(F, blocks, rule).per_factor.at(i);
}

inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::vector<double> default_epsilons() { return {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625}; }

inline ShrinkResult shrink_divergence(const MulticonformalFactors& F, int i, const std::vector<double>& epsilons,
                                      const CurvatureBundle& blocks, const QuadratureRule& rule, bool direct = true,
                                      double fit_below = 0.125) {
  const auto& g = F.geometry();
  check_factor(g, i);
  const int m = g.dim();
  const double pm = p_m(m);
  auto s = shrink_integrals(F, blocks, rule);
  ShrinkResult r;
  r.i = i;
  r.hypothesis = s.per_factor[i];
  if (!(r.hypothesis < 0))
    throw PreconditionError("shrinking factor " + std::to_string(i + 1) + " needs int (R_i + rho_i)/f_i^2 prod f^m < 0, got " +
                            std::to_string(r.hypothesis));
  const double norm = std::pow(s.volume, 2.0 / pm);
  r.A = s.per_factor[i] / norm;
  for (int j = 0; j < g.num_factors(); ++j)
    if (j != i) r.B += s.per_factor[j] / norm;
  const double mi = g.block_size(i);
  r.exponent = 2 * (mi / m - 1);
  std::vector<double> lx, ly;
  for (double eps : epsilons) {
    if (!(eps > 0)) throw ConfigError("shrink factors must be positive");
    ShrinkRow row;
    row.eps = eps;
    row.E_decomposed = std::pow(eps, r.exponent) * r.A + std::pow(eps, 2 * mi / m) * r.B;
    if (direct) {
      auto Fe = F.scaled(i, eps);
      row.E_direct = einstein_hilbert(deformed_metric(F.geometry_ptr(), Fe), rule);
      row.scaled_difference = std::abs(row.E_direct - row.E_decomposed) * std::pow(eps, -r.exponent);
    }
    if (eps <= fit_below) {
      lx.push_back(std::log(eps));
      ly.push_back(std::log(std::abs(direct ? row.E_direct : row.E_decomposed)));
    }
    r.rows.push_back(row);
  }
  r.fitted = static_cast<int>(lx.size());
  if (r.fitted >= 2) r.slope = fit_slope(lx, ly);
  return r;
}

// ---------------------------------------------------------------------------
// sin(sqrt(alpha) phi) construction on two factors

inline double gamma_of(const std::vector<int>& m, double beta) {
  const double m1 = m[0], m2 = m[1];
  return -((m1 - 1) * (m1 - 2) - 2 * (m1 - 1) * m2 * beta + m2 * (m2 - 1) * beta * beta);
}

// roots of (m1-1)(m1-2) - 2(m1-1) m2 b + m2(m2-1) b^2
inline std::vector<double> gamma_roots(const std::vector<int>& m) {
  const double m1 = m[0], m2 = m[1];
  const double a = m2 * (m2 - 1), b = -2 * (m1 - 1) * m2, c = (m1 - 1) * (m1 - 2);
  if (a == 0.0) return {-c / b};
  const double disc = std::sqrt(std::max(0.0, b * b - 4 * a * c));
  return {(-b - disc) / (2 * a), (-b + disc) / (2 * a)};
}

// vertex of the quadratic when m_2 >= 2 (largest gamma, so the smallest
// alpha does the job)
inline double default_beta(const std::vector<int>& m) {
  if (m[1] >= 2) return (m[0] - 1.0) / (m[1] - 1.0);
  return (m[0] - 2) / 2.0 + 1.0;
}

struct SinConstruction {
  MulticonformalFactors F;
  ScalarField phi;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double hypothesis = 0.0;
  int doublings = 0;
};

inline MulticonformalFactors sin_factors(const GeometryPtr& g, const ScalarField& phi, double alpha, double beta) {
  const double s = std::sqrt(alpha);
  return MulticonformalFactors(g, {phi.map([s](double x) { return std::exp(std::sin(s * x)); }),
                                   phi.map([s, beta](double x) { return std::exp(-beta * std::sin(s * x)); })});
}

inline ScalarField factor_profile(const GeometryPtr& g, int i) {
  const auto& f = g->factor(i);
  std::vector<double> prof(f.num_nodes());
  for (long long k = 0; k < f.num_nodes(); ++k) prof[k] = f.profile(f.point(k));
  ScalarField phi(g);
  for (long long p = 0; p < g->num_nodes(); ++p) phi[p] = prof[g->local_index(p, i)];
  return phi;
}

// alpha <= 0 requests the search: double alpha from 1 until the hypothesis
// integral of the shrinking lemma is negative.
inline SinConstruction sin_construction(const GeometryPtr& g, const CurvatureBundle& blocks, const QuadratureRule& rule, double alpha,
                                        std::optional<double> beta = std::nullopt, int max_doublings = 12) {
  if (g->num_factors() != 2) throw PreconditionError("the sin construction is set up for two factors");
  auto m = factor_dims(*g);
  if (m[0] < 2) throw PreconditionError("the sin construction needs m_1 >= 2");
  const double b = beta ? *beta : default_beta(m);
  const double gam = gamma_of(m, b);
  if (!(gam > 0)) {
    std::string roots;
    for (double x : gamma_roots(m)) roots += (roots.empty() ? "" : ", ") + std::to_string(x);
    throw PreconditionError("beta = " + std::to_string(b) + " gives gamma = " + std::to_string(gam) +
                            " <= 0; roots of the quadratic: " + roots);
  }
  auto phi = factor_profile(g, 0);
  const bool search = !(alpha > 0);
  double a = search ? 1.0 : alpha;
  int k = 0;
  for (;;) {
    auto F = sin_factors(g, phi, a, b);
    double hyp = lemma_hypothesis(F, 0, blocks, rule);
    if (!search || hyp < 0 || k >= max_doublings)
      return SinConstruction{std::move(F), phi, a, b, gam, hyp, k};
    a *= 2;
    ++k;
  }
}

}  // namespace multiconf
