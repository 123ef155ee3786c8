#include "common.hpp"

using namespace mct;

TEST(Christoffel, FlatTorusVanishes) {
  auto g = make_product({make_flat_torus(2, {}, 12), make_flat_torus(1, {}, 12)});
  EXPECT_LE(christoffel(MetricField::product(g)).max_abs(), 1e-14);
}

TEST(Christoffel, RoundSphere) {
  auto g = make_product({make_sphere(2, 1.0, 64)});
  auto G = christoffel(MetricField::product(g));
  double err = 0.0;
  for (long long p = 0; p < g->num_nodes(); ++p) {
    const double th = coord(g, p, 0);
    err = std::max(err, std::abs(G({0, 1, 1}, p) + std::sin(th) * std::cos(th)));
  }
  EXPECT_LE(err, 1e-3);
}

TEST(Christoffel, SymmetricInLowerIndices) {
  auto g = sphere_torus(10);
  auto F = random_factors(g, 3);
  auto G = christoffel(deformed_metric(g, F));
  const int m = g->dim();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) EXPECT_EQ(G.component((a * m + b) * m + c), G.component((a * m + c) * m + b));
}

TEST(Scalar, ProductOfUnitSpheres) {
  auto g = sphere_sphere(16);
  auto R = scalar_curvature(MetricField::product(g));
  EXPECT_LE((R - ScalarField(g, 4.0)).max_abs(), 1e-2);
}

TEST(Scalar, SumOfBlocksPerNode) {
  auto g = sphere_torus(10);
  auto F = random_factors(g, 4);
  auto b = curvature(deformed_metric(g, F), CurvatureLevel::full);
  double worst = 0.0;
  for (long long p = 0; p < g->num_nodes(); ++p) {
    double s = 0.0;
    for (const auto& sb : b.scalar_blocks) s += sb[p];
    worst = std::max(worst, std::abs(s - b.scalar[p]) / (1.0 + std::abs(b.scalar[p])));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Scalar, ProductRicciHasNoCrossBlocks) {
  auto g = sphere_sphere(16, 2.0);
  auto b = curvature(MetricField::product(g), CurvatureLevel::full);
  for (int a = 0; a < 2; ++a)
    for (int c = 2; c < 4; ++c) {
      for (double x : b.ricci.component(a * 4 + c)) EXPECT_LE(std::abs(x), 1e-8);
      for (double x : b.ricci.component(c * 4 + a)) EXPECT_LE(std::abs(x), 1e-8);
    }
  // Einstein constants 1 and 1/4
  EXPECT_NEAR(b.scalar_blocks[0].max(), 2.0, 1e-4);
  EXPECT_NEAR(b.scalar_blocks[1].max(), 0.5, 1e-4);
}

TEST(Scalar, FactorwiseMatchesFullProduct) {
  auto g = make_product({make_sphere(2, 1.0, 12), make_bumpy_torus(2, {}, 12)});
  auto full = curvature(MetricField::product(g), CurvatureLevel::scalar);
  auto fac = product_curvature(g);
  EXPECT_LE((full.scalar - fac.scalar).max_abs(), 1e-9);
}

TEST(Scalar, SecondOrderStencilsConvergeAtRateFour) {
  // halving h divides the error by 4 +- 20% with second order stencils
  const double eps = 0.3;
  std::vector<double> e;
  for (int N : {16, 32, 64}) {
    auto g = make_product({make_conformal_torus(2, {}, N, eps)}, 2);
    auto R = scalar_curvature(MetricField::product(g));
    double err = 0.0;
    for (long long p = 0; p < g->num_nodes(); ++p) {
      const double s = coord(g, p, 0) + coord(g, p, 1);
      err = std::max(err, std::abs(R[p] - 4 * eps * std::cos(s) * std::exp(-2 * eps * std::cos(s))));
    }
    e.push_back(err);
  }
  EXPECT_NEAR(e[0] / e[1], 4.0, 0.8);
  EXPECT_NEAR(e[1] / e[2], 4.0, 0.8);
}

TEST(Scalar, DeformedMetricIsBlockDiagonal) {
  auto g = sphere_torus(10);
  auto M = deformed_metric(g, random_factors(g, 8));
  EXPECT_TRUE(M.block_diagonal());
}

TEST(Scalar, DegenerateMetricIsRejected) {
  auto g = torus_torus(8);
  auto M = MetricField::product(g);
  std::vector<double> zero(g->num_nodes(), 1.0);
  zero[5] = 0.0;
  M.set(0, 0, zero);
  EXPECT_THROW(curvature(M), SingularMetricError);
}
