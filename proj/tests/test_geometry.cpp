#include "common.hpp"

using namespace mct;

TEST(Differentiation, ConstantHasZeroDerivative) {
  auto g = sphere_torus(12);
  ScalarField one(g, 1.0);
  for (int a = 0; a < g->dim(); ++a) EXPECT_LE(partial_derivative(one, a).max_abs(), 1e-12);
}

TEST(Differentiation, SineOnPeriodicAxis) {
  auto g = make_product({make_flat_torus(1, {2 * pi}, 64)});
  auto f = ScalarField::from_function(g, [](const std::vector<double>& x) { return std::sin(x[0]); });
  auto d = partial_derivative(f, 0);
  double err = 0.0;
  for (long long p = 0; p < g->num_nodes(); ++p) err = std::max(err, std::abs(d[p] - std::cos(coord(g, p, 0))));
  EXPECT_LE(err, 5e-3);
}

TEST(Differentiation, QuadraticOnOpenAxisIsExact) {
  for (int order : {2, 4, 6, 8}) {
    auto g = make_product({make_interval(0.0, 1.0, 17)}, order);
    auto f = ScalarField::from_function(g, [](const std::vector<double>& x) { return x[0] * x[0]; });
    auto d = partial_derivative(f, 0);
    auto d2 = second_partial_derivative(f, 0, 0);
    for (long long p = 0; p < g->num_nodes(); ++p) {
      EXPECT_NEAR(d[p], 2 * coord(g, p, 0), 1e-8) << "order " << order;
      EXPECT_NEAR(d2[p], 2.0, 1e-8) << "order " << order;
    }
  }
}

TEST(Differentiation, BlockGradientVanishesAlongOtherFactor) {
  auto g = torus_torus(12);
  auto f = ScalarField::from_function(g, [](const std::vector<double>& x) { return std::sin(x[0]); });
  EXPECT_LE(block_gradient(f, 1).max_abs(), 1e-14);
  EXPECT_GT(block_gradient(f, 0).max_abs(), 0.9);
}

TEST(Differentiation, GradientOfCosThetaOnRoundSphere) {
  auto g = make_product({make_sphere(2, 1.0, 64)});
  auto f = ScalarField::from_function(g, [](const std::vector<double>& x) { return std::cos(x[0]); });
  auto grad = block_gradient(f, 0);
  double err = 0.0;
  for (long long p = 0; p < g->num_nodes(); ++p) {
    const double th = coord(g, p, 0);
    // |grad f|^2 = g_ab grad^a grad^b
    const double n2 = grad.component(0)[p] * grad.component(0)[p] + std::sin(th) * std::sin(th) * grad.component(1)[p] * grad.component(1)[p];
    err = std::max(err, std::abs(n2 - std::sin(th) * std::sin(th)));
  }
  EXPECT_LE(err, 1e-3);
}

TEST(Laplacian, ConstantGivesZero) {
  auto g = sphere_torus(12);
  for (int i = 0; i < 2; ++i) {
    auto [hess, lap] = block_hessian_laplacian(ScalarField(g, 3.0), i);
    EXPECT_LE(hess.max_abs(), 1e-12);
    EXPECT_LE(lap.max_abs(), 1e-12);
  }
}

TEST(Laplacian, SineOnCircle) {
  auto g = make_product({make_flat_torus(1, {2 * pi}, 64)});
  auto f = ScalarField::from_function(g, [](const std::vector<double>& x) { return std::sin(x[0]); });
  auto lap = block_hessian_laplacian(f, 0).second;
  double err = 0.0;
  for (long long p = 0; p < g->num_nodes(); ++p) err = std::max(err, std::abs(lap[p] + std::sin(coord(g, p, 0))));
  EXPECT_LE(err, 5e-3);
}

TEST(Laplacian, SphericalHarmonicEigenvalue) {
  // Delta of cos theta on S^2(2) is -2 cos theta / 4
  auto g = make_product({make_sphere(2, 2.0, 32)});
  auto f = ScalarField::from_function(g, [](const std::vector<double>& x) { return std::cos(x[0]); });
  auto lap = block_hessian_laplacian(f, 0).second;
  for (long long p = 0; p < g->num_nodes(); ++p) EXPECT_NEAR(lap[p], -0.5 * f[p], 1e-6);
}

TEST(Laplacian, ChainRuleConverges) {
  // Delta exp(u) = exp(u) (Delta u + |du|^2)
  std::vector<double> h, e;
  for (int N : {12, 24}) {
    auto g = sphere_torus(N);
    auto u = trig_polynomial(g, exptrig(5));
    auto f = u.map([](double x) { return std::exp(x); });
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
      auto lf = block_hessian_laplacian(f, i).second;
      auto lu = block_hessian_laplacian(u, i).second;
      JetEvaluator je(*g, {u.data()});
      Jet J;
      for_each_node(*g, [&](long long p, const long long* loc) {
        je.eval(p, loc, J);
        worst = std::max(worst, std::abs(lf[p] - f[p] * (lu[p] + J.ip[i][0][0])));
      });
    }
    h.push_back(g->h_max());
    e.push_back(worst);
  }
  EXPECT_GE(order_of(h, e), 1.8);
}

TEST(Quadrature, FlatTorusVolume) {
  auto g = make_product({make_flat_torus(2, {2 * pi, 2 * pi}, 16)});
  QuadratureRule rule(g);
  EXPECT_NEAR(rule.integrate(ScalarField(g, 1.0)), 4 * pi * pi, 1e-9);
  EXPECT_NEAR(rule.volume(), 4 * pi * pi, 1e-9);
}

TEST(Quadrature, GaussBonnetOnSphere) {
  auto g = make_product({make_sphere(2, 1.0, 24)});
  QuadratureRule rule(g);
  auto R = scalar_curvature(MetricField::product(g));
  EXPECT_NEAR(rule.integrate(R), 8 * pi, 1e-2);
}

TEST(Quadrature, SphereVolumes) {
  EXPECT_NEAR(QuadratureRule(make_product({make_sphere(2, 1.5, 16)})).volume(), 4 * pi * 2.25, 1e-9);
  EXPECT_NEAR(QuadratureRule(make_product({make_sphere(3, 1.0, 12)})).volume(), 2 * pi * pi, 1e-9);
}

TEST(Quadrature, IntegralOfLaplacianVanishes) {
  std::vector<double> h, e;
  for (int N : {12, 24}) {
    auto g = sphere_torus(N);
    QuadratureRule rule(g);
    auto phi = trig_polynomial(g, exptrig(9));
    double s = 0.0;
    for (int i = 0; i < 2; ++i) s += std::abs(rule.integrate(block_hessian_laplacian(phi, i).second));
    h.push_back(g->h_max());
    e.push_back(s);
  }
  EXPECT_LE(e.back(), 1e-10);
}

TEST(BuiltIns, RoundSphereScalarCurvature) {
  for (auto [m, r] : std::vector<std::pair<int, double>>{{2, 1.0}, {2, 2.0}, {3, 1.0}, {3, 0.5}}) {
    auto g = make_product({make_sphere(m, r, 24)});
    auto R = scalar_curvature(MetricField::product(g));
    const double exact = m * (m - 1) / (r * r);
    EXPECT_LE((R - ScalarField(g, exact)).max_abs(), 2e-3 * exact) << "S^" << m << "(" << r << ")";
  }
}

TEST(BuiltIns, FlatTorusIsFlatToRounding) {
  auto g = make_product({make_flat_torus(3, {1.0, 2.0, 3.0}, 10)});
  EXPECT_LE(scalar_curvature(MetricField::product(g)).max_abs(), 1e-12);
}

TEST(BuiltIns, ConformalTorusMatchesAnalyticCurvature) {
  // g = exp(2u) delta, u = eps cos(x + y): R = -2 exp(-2u) Lap u
  const double eps = 0.3;
  auto g = make_product({make_conformal_torus(2, {}, 32, eps)});
  auto R = scalar_curvature(MetricField::product(g));
  double err = 0.0;
  for (long long p = 0; p < g->num_nodes(); ++p) {
    const double s = coord(g, p, 0) + coord(g, p, 1);
    const double exact = -2 * std::exp(-2 * eps * std::cos(s)) * (-2 * eps * std::cos(s));
    err = std::max(err, std::abs(R[p] - exact));
  }
  EXPECT_LE(err, 5e-6);
}

TEST(BuiltIns, RejectsBadFactors) {
  EXPECT_THROW(make_sphere(1, 1.0, 16), ConfigError);
  EXPECT_THROW(make_flat_torus(2, {1.0, 2.0, 3.0}, 16), ConfigError);
  EXPECT_THROW(make_sphere(2, 1.0, 6).validate(), ConfigError);
  EXPECT_THROW(make_sphere(2, 1.0, 17).validate(), ConfigError);
}

TEST(Grid, FactorMajorRowMajorIndexing) {
  auto g = make_product({make_flat_torus(1, {}, 8), make_flat_torus(2, {}, 10)});
  long long loc[kMaxFactors];
  g->locals(123, loc);
  EXPECT_EQ(loc[0] * 100 + loc[1], 123);
  EXPECT_EQ(g->num_nodes(), 800);
}
