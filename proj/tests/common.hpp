#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "multiconf/commands.hpp"

namespace mct {

using namespace multiconf;

constexpr double pi = std::numbers::pi;

inline GeometryPtr sphere_torus(int N) { return make_product({make_sphere(2, 1.0, N), make_flat_torus(2, {2 * pi, pi}, N)}); }
inline GeometryPtr torus_torus(int N) { return make_product({make_flat_torus(2, {}, N), make_flat_torus(2, {}, N)}); }
inline GeometryPtr sphere_sphere(int N, double r2 = 1.0) { return make_product({make_sphere(2, 1.0, N), make_sphere(2, r2, N)}); }

inline FieldTemplate exptrig(std::uint64_t seed, std::vector<int> deps = {}, int max_freq = 2) {
  FieldTemplate t;
  t.kind = TemplateKind::exp_trig;
  t.seed = seed;
  t.depends_on = std::move(deps);
  t.max_freq = max_freq;
  return t;
}

inline MulticonformalFactors random_factors(const GeometryPtr& g, std::uint64_t seed, int max_freq = 2) {
  std::vector<ScalarField> f;
  for (int i = 0; i < g->num_factors(); ++i) f.push_back(evaluate_template(g, exptrig(mix_seed(seed, i), {}, max_freq)));
  return MulticonformalFactors(g, std::move(f));
}

// slope of log e against log h over consecutive rungs
inline double order_of(const std::vector<double>& h, const std::vector<double>& e) { return convergence_order(h, e); }

// chart coordinate a of node p
inline double coord(const GeometryPtr& g, long long p, int a) { return g->coords(p)[a]; }

}  // namespace mct
