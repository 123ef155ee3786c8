// Acceptance run: one PASS/FAIL line per criterion.  Tolerances are pinned
// here on purpose and do not read --tol-file.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "multiconf/commands.hpp"

using namespace multiconf;

namespace {

constexpr double kMinOrder = 1.8;
constexpr double kCurvatureFinal = 1e-2;
constexpr double kQuadratic = 1e-9;
constexpr double kBSuiteSeconds = 10.0;
constexpr double kChangeOfVars = 1e-9;
constexpr double kKeyInequalityZero = 1e-8;
constexpr double kFlatZero = 1e-6;
constexpr double kSphereRelative = 0.01;
constexpr double kSlope = 0.05;
constexpr double kShrinkDifference = 1e-2;
constexpr double kFirstVariation = 0.02;
constexpr double kEinstein = 1e-3;

double now() { return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", x);
  return b;
}

FieldTemplate trig(std::uint64_t seed, std::vector<int> deps = {}) {
  FieldTemplate t;
  t.kind = TemplateKind::trig_poly;
  t.seed = seed;
  t.depends_on = std::move(deps);
  return t;
}

FieldTemplate exptrig(std::uint64_t seed, std::vector<int> deps = {}) {
  FieldTemplate t;
  t.kind = TemplateKind::exp_trig;
  t.seed = seed;
  t.depends_on = std::move(deps);
  return t;
}

using Builder = std::function<GeometryPtr(int)>;

GeometryPtr sphere_torus(int N) { return make_product({make_sphere(2, 1.0, N), make_flat_torus(2, {2 * std::numbers::pi, std::numbers::pi}, N)}); }
GeometryPtr torus_torus(int N) { return make_product({make_flat_torus(2, {}, N), make_flat_torus(2, {}, N)}); }

// max-node |a - b| on each rung of the ladder
Outcome ladder_outcome(const std::string& name, const std::vector<double>& h, const std::vector<double>& e) {
  auto v = judge_ladder(h, e, kCurvatureFinal, kMinOrder, 0.0);
  std::string d = name + " errors";
  for (double x : e) d += " " + fmt(x);
  d += " order " + fmt(v.order);
  return {v.pass, d};
}

Outcome criterion1() {
  Outcome o{true, ""};
  for (int which = 0; which < 2; ++which) {
    Builder b = which == 0 ? Builder(sphere_torus) : Builder(torus_torus);
    std::vector<double> h, e;
    for (int N : {16, 32, 64}) {
      auto g = b(N);
      MulticonformalFactors F(g, {evaluate_template(g, trig(11)), evaluate_template(g, trig(12))});
      auto closed = scalar_curvature_tilde(F, product_curvature(g));
      auto brute = scalar_curvature(deformed_metric(g, F));
      h.push_back(g->h_max());
      e.push_back((closed - brute).max_abs());
    }
    auto r = ladder_outcome(which == 0 ? "S2xT2" : "T2xT2", h, e);
    o.pass = o.pass && r.pass;
    o.detail += (o.detail.empty() ? "" : "; ") + r.detail;
  }
  return o;
}

Outcome criterion2() {
  Outcome o{true, ""};
  std::vector<double> h, ec, ew;
  for (int N : {16, 32, 64}) {
    auto g = sphere_torus(N);
    auto blocks = product_curvature(g);
    auto f = evaluate_template(g, trig(21));
    MulticonformalFactors C(g, {f, f});
    ec.push_back((scalar_curvature_tilde(C, blocks) - conformal_reference(f, blocks)).max_abs());
    MulticonformalFactors W(g, {ScalarField(g, 1.0), evaluate_template(g, trig(22, {0}))});
    ew.push_back((scalar_curvature_tilde(W, blocks) - warped_reference(W, blocks)).max_abs());
    h.push_back(g->h_max());
  }
  auto a = ladder_outcome("conformal", h, ec);
  auto b = ladder_outcome("warped", h, ew);
  return {a.pass && b.pass, a.detail + "; " + b.detail};
}

Outcome criterion3() {
  const double t0 = now();
  auto r = b_matrix_suite(1000000, 3);
  const double dt = now() - t0;
  const bool ok = r.failures == 0 && r.min_margin > 0 && r.worst_quadratic <= kQuadratic && r.counterexample_not_negative && dt <= kBSuiteSeconds;
  return {ok, std::to_string(r.matrices) + " matrices negative definite (min margin " + fmt(r.min_margin) + "), " + std::to_string(r.vectors) +
                  " vectors worst " + fmt(r.worst_quadratic) + ", m=(1,2) " + r.counterexample["definiteness"].get<std::string>() + ", " +
                  fmt(dt) + " s"};
}

Outcome criterion4() {
  const std::vector<std::vector<double>> qs{{0, 0}, {2, 2}, {3, 1}};
  std::map<std::string, std::vector<double>> res;
  std::vector<double> h;
  double value = 0.0, value_const = 0.0;
  const std::vector<int> ladder{12, 24, 48};
  for (int N : ladder) {
    auto g = sphere_torus(N);
    QuadratureRule rule(g);
    MulticonformalFactors F(g, {evaluate_template(g, exptrig(100)), evaluate_template(g, exptrig(101))});
    h.push_back(g->h_max());
    for (size_t k = 0; k < qs.size(); ++k) {
      auto rho = integral_rho_identity(F, qs[k], rule);
      for (size_t i = 0; i < rho.size(); ++i) res["rho q" + std::to_string(k) + " i" + std::to_string(i)].push_back(rho[i].residual);
      res["key q" + std::to_string(k)].push_back(key_integral_formula(F, qs[k], rule).residual);
    }
    if (N == ladder.back()) {
      value = key_inequality(F, rule).value;
      value_const = key_inequality(MulticonformalFactors::constant(g, {1.3, 0.7}), rule).value;
    }
  }
  bool ok = true;
  double worst_order = 1e300, worst_final = 0.0;
  for (auto& [k, e] : res) {
    const double ord = convergence_order(h, e);
    worst_order = std::min(worst_order, ord);
    worst_final = std::max(worst_final, std::abs(e.back()));
    ok = ok && ord >= kMinOrder;
  }
  ok = ok && value < 0 && std::abs(value_const) <= kKeyInequalityZero;
  return {ok, std::to_string(res.size()) + " residual ladders, min order " + fmt(worst_order) + ", worst final " + fmt(worst_final) +
                  "; key inequality " + fmt(value) + " (constant F: " + fmt(value_const) + ")"};
}

Outcome criterion5() {
  double worst = 0.0;
  for (int N : {12, 24}) {
    auto g = sphere_torus(N);
    for (int k = 0; k < 20; ++k) {
      Rng rng(mix_seed(5, k));
      auto spec = ChangeOfVarsSpec::random(2, rng);
      MulticonformalFactors F(g, {evaluate_template(g, exptrig(mix_seed(6, k))), evaluate_template(g, exptrig(mix_seed(7, k)))});
      for (int i = 0; i < 2; ++i) worst = std::max(worst, change_of_variables_check(spec, F, i).relative);
    }
  }
  return {worst <= kChangeOfVars, "20 tuples at N=12 and N=24, worst relative " + fmt(worst)};
}

Outcome criterion6() {
  const int N = 20;
  auto c1 = classify_trichotomy(*sphere_torus(N)).case_id;
  auto c2 = classify_trichotomy(*torus_torus(N)).case_id;
  auto c3 = classify_trichotomy(*make_product({make_bumpy_torus(3, {}, N), make_flat_torus(2, {}, N)})).case_id;
  auto flat = conformal_ground_eigen(make_flat_torus(3, {}, N));
  auto sph = conformal_ground_eigen(make_sphere(3, 1.0, N));
  auto bumpy = conformal_ground_eigen(make_bumpy_torus(3, {}, N));
  const bool ok = c1 == 1 && c2 == 2 && c3 == 3 && std::abs(flat.lambda0) <= kFlatZero && std::abs(sph.lambda0 - 6) <= kSphereRelative * 6 &&
                  bumpy.lambda0 < 0 && std::abs(bumpy.lambda0) > 10 * bumpy.tolerance * std::max(1.0, std::abs(bumpy.lambda0));
  return {ok, "cases " + std::to_string(c1) + "/" + std::to_string(c2) + "/" + std::to_string(c3) + ", lambda0 flat T3 " + fmt(flat.lambda0) +
                  ", S3 " + fmt(sph.lambda0) + ", bumpy T3 " + fmt(bumpy.lambda0) + " (solver tol " + fmt(bumpy.tolerance) + ")"};
}

Outcome criterion7() {
  auto g = sphere_torus(48);
  QuadratureRule rule(g);
  auto blocks = product_curvature(g);
  auto sc = sin_construction(g, blocks, rule, 0.0);
  if (!(sc.hypothesis < 0)) return {false, "alpha search failed, hypothesis " + fmt(sc.hypothesis)};
  auto r = shrink_divergence(sc.F, 0, default_epsilons(), blocks, rule);
  double worst = 0.0;
  for (const auto& row : r.rows) worst = std::max(worst, row.scaled_difference);
  const bool ok = std::abs(r.slope - r.exponent) <= kSlope * std::abs(r.exponent) && worst <= kShrinkDifference;
  return {ok, "alpha " + fmt(sc.alpha) + " beta " + fmt(sc.beta) + " hypothesis " + fmt(sc.hypothesis) + ", slope " + fmt(r.slope) +
                  " (expected " + fmt(r.exponent) + "), worst scaled difference " + fmt(worst)};
}

Outcome criterion8() {
  const int N = 24;
  bool ok = true;
  std::string d;
  for (double r2 : {2.0, 1.0}) {
    auto g = make_product({make_sphere(2, 1.0, N), make_sphere(2, r2, N)});
    QuadratureRule rule(g);
    auto metric = MetricField::product(g);
    double worst = 0.0;
    for (int s = 0; s < 3; ++s) {
      auto fv = first_variation_check(metric, random_direction(g, 1000 + s), rule);
      if (r2 == 2.0) {
        worst = std::max(worst, fv.relative);
      } else {
        worst = std::max({worst, std::abs(fv.richardson) / fv.scale, std::abs(fv.formula) / fv.scale});
      }
    }
    if (r2 == 2.0) {
      ok = ok && worst <= kFirstVariation;
      d += "S2(1)xS2(2) worst relative " + fmt(worst);
    } else {
      ok = ok && worst <= kEinstein;
      d += "; S2(1)xS2(1) worst |dE/dt|/scale " + fmt(worst);
    }
  }
  return {ok, d};
}

Outcome criterion9() {
  bool ok = true;
  std::string d;
  for (int which = 0; which < 2; ++which) {
    auto g = which == 0 ? torus_torus(32) : make_product({make_sphere(2, 1.0, 32), make_sphere(2, 1.0, 32)});
    QuadratureRule rule(g);
    auto blocks = product_curvature(g);
    double base_min = 1e300;
    for (const auto& b : blocks.scalar_blocks) base_min = std::min(base_min, b.min());
    MulticonformalFactors F(g, {evaluate_template(g, exptrig(91, {1})), evaluate_template(g, exptrig(92, {0}))});
    auto c = permutation_nonnegativity(F, blocks, rule);
    const bool both = c.min_scalar < 0 && c.max_scalar > 0;
    ok = ok && base_min >= -1e-8 && c.rhs_nonnegative && c.sign_consistent;
    d += std::string(d.empty() ? "" : "; ") + (which == 0 ? "T2xT2" : "S2xS2") + " rhs " + fmt(c.rhs) + " (lhs " + fmt(c.lhs) + "), R~ in [" +
         fmt(c.min_scalar) + ", " + fmt(c.max_scalar) + "]" + (both ? " both signs" : "");
  }
  return {ok, d};
}

Outcome criterion10(const std::filesystem::path& work) {
  auto run = [&](const std::string& tag) {
    std::ostringstream sink;
    RunConfig a;
    a.command = "verify-curvature";
    a.ladder = {12, 16};
    a.seed = 42;
    a.suites = {"oracle", "conformal", "warped"};
    a.out = work / (tag + "_curvature");
    run_command(a, sink, sink);
    RunConfig b;
    b.command = "verify-identities";
    b.ladder = {12, 16};
    b.seed = 42;
    b.suites = {"lemma", "rho", "key"};
    b.out = work / (tag + "_identities");
    run_command(b, sink, sink);
  };
  run("first");
  run("second");
  int files = 0;
  bool same = true;
  for (const char* sub : {"_curvature", "_identities"})
    for (const auto& e : std::filesystem::directory_iterator(work / (std::string("first") + sub))) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      auto other = work / (std::string("second") + sub) / e.path().filename();
      same = same && std::filesystem::exists(other) && read_file(e.path()) == read_file(other);
    }
  return {same && files > 0, std::to_string(files) + " CSV files compared byte for byte"};
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path work = "acceptance_work";
  std::vector<int> only;
  for (int k = 1; k < argc; ++k) {
    std::string a = argv[k];
    if (a == "--work" && k + 1 < argc)
      work = argv[++k];
    else
      only.push_back(std::atoi(argv[k]));
  }
  std::filesystem::remove_all(work);
  std::filesystem::create_directories(work);
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle equivalence", criterion1},
      {"conformal and warped reductions", criterion2},
      {"B-matrix suite", criterion3},
      {"integral identities", criterion4},
      {"change of variables", criterion5},
      {"trichotomy", criterion6},
      {"shrinking divergence", criterion7},
      {"first variation", criterion8},
      {"permutation certificate", criterion9},
      {"determinism", [&] { return criterion10(work); }},
  };
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    if (!only.empty() && std::find(only.begin(), only.end(), int(k + 1)) == only.end()) continue;
    const double t0 = now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %-32s %s  %s  [%.1f s]\n", k + 1, criteria[k].first.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), now() - t0);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
