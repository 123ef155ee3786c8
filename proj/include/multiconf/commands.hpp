#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "identities.hpp"
#include "permutation.hpp"
#include "reductions.hpp"
#include "report.hpp"
#include "variational.hpp"

namespace multiconf {

enum ExitCode { kPass = 0, kVerificationFailure = 1, kConfigError = 2, kPreconditionError = 3 };

inline std::vector<FactorSpec> default_factors() {
  FactorSpec s;
  s.kind = "sphere";
  s.dim = 2;
  FactorSpec t;
  t.kind = "flat_torus";
  t.dim = 2;
  t.lengths = {2 * std::numbers::pi, std::numbers::pi};
  return {s, t};
}

// Fill command defaults for anything the user left out.
inline RunConfig with_defaults(RunConfig c) {
  if (c.factors.empty()) c.factors = default_factors();
  if (c.ladder.empty()) {
    if (c.command == "verify-curvature") c.ladder = {16, 32, 64};
    else if (c.command == "verify-identities") c.ladder = {12, 24, 48};
    else if (c.command == "classify") c.ladder = {20};
    else c.ladder = {48};
  }
  if (c.suites.empty()) {
    if (c.command == "verify-curvature") c.suites = {"oracle"};
    else if (c.command == "verify-identities") c.suites = {"lemma", "bmatrix", "bsuite", "rho", "key", "inequality"};
  }
  const int l = static_cast<int>(c.factors.size());
  if (c.q.empty() && c.command == "verify-identities") {
    c.q.push_back(std::vector<double>(l, 0.0));
    if (l == 2) {
      c.q.push_back({2, 2});
      c.q.push_back({3, 1});
    } else {
      std::vector<double> q;
      for (const auto& f : c.factors) q.push_back(f.dim);
      c.q.push_back(q);
    }
  }
  if (c.epsilons.empty()) c.epsilons = default_epsilons();
  if (c.fields.empty() && c.command != "divergence" && c.command != "classify") {
    if (c.command == "verify-curvature")
      c.fields = default_fields(l, TemplateKind::trig_poly, c.seed);
    else if (c.command == "verify-identities" && c.suites.size() == 1 && c.suites[0] == "permutation") {
      // f_i varies along the next factor only
      c.fields = default_fields(l, TemplateKind::exp_trig, c.seed);
      for (int i = 0; i < l; ++i) c.fields[i].tmpl.depends_on = {(i + 1) % l};
    } else {
      c.fields = default_fields(l, TemplateKind::exp_trig, c.seed);
    }
  }
  c.validate();
  return c;
}

inline GeometryPtr build_geometry(const RunConfig& c, int nodes) {
  std::vector<FactorGrid> f;
  for (const auto& s : c.factors) f.push_back(build_factor(s, nodes));
  return make_product(std::move(f), c.order);
}

// unlisted factors get f = 1
inline MulticonformalFactors build_fields(const GeometryPtr& g, const std::vector<FieldSpec>& fields) {
  std::vector<ScalarField> f;
  for (int i = 0; i < g->num_factors(); ++i) f.emplace_back(g, 1.0);
  for (const auto& s : fields) f.at(s.factor) = evaluate_template(g, s.tmpl);
  return MulticonformalFactors(g, std::move(f));
}

inline bool all_constant(const std::vector<FieldSpec>& fields) {
  for (const auto& s : fields)
    if (s.tmpl.kind != TemplateKind::constant) return false;
  return true;
}

// least squares slope of log |e| against log h
inline double convergence_order(const std::vector<double>& h, const std::vector<double>& e) {
  std::vector<double> x, y;
  for (size_t k = 0; k < h.size(); ++k) {
    x.push_back(std::log(h[k]));
    y.push_back(std::log(std::max(std::abs(e[k]), 1e-300)));
  }
  return fit_slope(x, y);
}

struct LadderVerdict {
  double order = 0.0;
  bool order_checked = false;
  bool pass = false;
  std::string note;
};

// floor: errors below it are rounding noise and carry no order information
inline LadderVerdict judge_ladder(const std::vector<double>& h, const std::vector<double>& err, double final_tol, double min_order,
                                  double floor) {
  LadderVerdict v;
  const double last = std::abs(err.back());
  if (last <= floor) {
    v.pass = true;
    v.note = "errors at rounding level, order test skipped";
    return v;
  }
  if (h.size() < 2) {
    v.pass = last <= final_tol;
    v.note = "single rung, order not estimated";
    return v;
  }
  v.order = convergence_order(h, err);
  v.order_checked = true;
  v.pass = v.order >= min_order && last <= final_tol;
  return v;
}

inline Json verdict_json(const LadderVerdict& v) {
  Json j;
  j["order"] = v.order_checked ? Json(v.order) : Json(nullptr);
  j["pass"] = v.pass;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

inline void print_tolerance(std::ostream& log, const std::string& suite, const std::string& what) {
  log << "[" << suite << "] tolerance: " << what << "\n";
}

// ---------------------------------------------------------------------------

inline int cmd_verify_curvature(const RunConfig& cfg, RunDirectory& out, std::ostream& log) {
  const auto& tol = cfg.tol;
  Json summary;
  bool pass = true;
  for (const std::string suite : {"oracle", "conformal", "warped"}) {
    if (!cfg.has_suite(suite)) continue;
    print_tolerance(log, suite, "order >= " + format_double(tol.min_order) + ", final max error <= " + format_double(tol.curvature_final));
    CsvTable t({"h", "nodes", "max_error", "max_abs_scalar"});
    std::vector<double> hs, errs;
    bool constant = all_constant(cfg.fields);
    double scale = 0.0;
    for (int N : cfg.ladder) {
      auto g = build_geometry(cfg, N);
      auto blocks = product_curvature(g);
      ScalarField closed, other;
      if (suite == "oracle") {
        auto F = build_fields(g, cfg.fields);
        closed = scalar_curvature_tilde(F, blocks);
        other = scalar_curvature(deformed_metric(g, F));
      } else if (suite == "conformal") {
        // one field for every factor
        auto f = evaluate_template(g, cfg.fields.at(0).tmpl);
        MulticonformalFactors F(g, std::vector<ScalarField>(g->num_factors(), f));
        closed = scalar_curvature_tilde(F, blocks);
        other = conformal_reference(f, blocks);
        constant = cfg.fields.at(0).tmpl.kind == TemplateKind::constant;
      } else {
        // f_1 = 1, the rest restricted to the first factor
        std::vector<ScalarField> f{ScalarField(g, 1.0)};
        constant = true;
        for (int j = 1; j < g->num_factors(); ++j) {
          FieldTemplate tj = cfg.fields.size() > static_cast<size_t>(j) ? cfg.fields[j].tmpl : cfg.fields.back().tmpl;
          tj.depends_on = {0};
          constant = constant && tj.kind == TemplateKind::constant;
          f.push_back(evaluate_template(g, tj));
        }
        MulticonformalFactors F(g, std::move(f));
        closed = scalar_curvature_tilde(F, blocks);
        other = warped_reference(F, blocks);
      }
      const double err = (closed - other).max_abs();
      scale = std::max(scale, closed.max_abs());
      hs.push_back(g->h_max());
      errs.push_back(err);
      t.add({g->h_max(), double(N), err, closed.max_abs()});
      log << "[" << suite << "] N=" << N << " h=" << format_double(g->h_max()) << " max error " << format_double(err) << "\n";
    }
    const double floor = constant ? tol.rounding * std::max(1.0, scale) : 0.0;
    auto v = judge_ladder(hs, errs, tol.curvature_final, tol.min_order, floor);
    if (v.order_checked) log << "[" << suite << "] order " << format_double(v.order) << "\n";
    if (!v.note.empty()) log << "[" << suite << "] " << v.note << "\n";
    log << "[" << suite << "] " << (v.pass ? "PASS" : "FAIL") << "\n";
    out.write_csv("curvature_" + suite + ".csv", t);
    summary[suite] = verdict_json(v);
    summary[suite]["final_error"] = errs.back();
    pass = pass && v.pass;
  }
  summary["tolerances"] = tol.to_json();
  out.write_json("summary.json", summary);
  return pass ? kPass : kVerificationFailure;
}

// ---------------------------------------------------------------------------

struct BSuiteResult {
  long long matrices = 0;
  int failures = 0;  // B^i(0) not negative definite
  double min_margin = 1e300;
  double worst_quadratic = 0.0;
  long long vectors = 0;
  bool counterexample_not_negative = false;
  Json counterexample;
};

inline Json b_matrix_json(const BMatrix& B) {
  Json j;
  j["i"] = B.i;
  j["q"] = B.q;
  j["m"] = B.m;
  Json rows = Json::array();
  for (int r = 0; r < B.entries.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < B.entries.cols(); ++c) row.push_back(B.entries(r, c));
    rows.push_back(row);
  }
  j["entries"] = rows;
  j["exact"] = B.exact;
  j["eigenvalues"] = B.eigenvalues;
  j["definiteness"] = definiteness_name(B.definiteness);
  j["margin"] = B.margin;
  return j;
}

// Every l <= 4 and m_i in {2..5}; the quadratic form identity on
// `vectors` seeded random vectors spread over the same set.
inline BSuiteResult b_matrix_suite(long long vectors, std::uint64_t seed) {
  BSuiteResult r;
  std::vector<std::vector<int>> dims;
  for (int l = 1; l <= 4; ++l) {
    std::vector<int> m(l, 2);
    for (;;) {
      dims.push_back(m);
      int k = 0;
      while (k < l && m[k] == 5) m[k++] = 2;
      if (k == l) break;
      ++m[k];
    }
  }
  long long pairs = 0;
  for (const auto& m : dims) pairs += m.size();
  const long long per = std::max<long long>(1, (vectors + pairs - 1) / pairs);
  std::uint64_t s = seed;
  for (const auto& m : dims)
    for (int i = 0; i < static_cast<int>(m.size()); ++i) {
      auto B = b_matrix(i, std::vector<double>(m.size(), 0.0), m);
      ++r.matrices;
      if (B.definiteness != Definiteness::negative) ++r.failures;
      r.min_margin = std::min(r.min_margin, B.margin);
      r.worst_quadratic = std::max(r.worst_quadratic, quadratic_form_residual(i, m, per, mix_seed(s++, 7)));
      r.vectors += per;
    }
  auto C = b_matrix(0, {0.0, 0.0}, {1, 2});
  r.counterexample_not_negative = C.definiteness != Definiteness::negative;
  r.counterexample = b_matrix_json(C);
  return r;
}

inline int cmd_verify_identities(const RunConfig& cfg, RunDirectory& out, std::ostream& log) {
  const auto& tol = cfg.tol;
  const int l = static_cast<int>(cfg.factors.size());
  std::vector<int> m;
  for (const auto& f : cfg.factors) m.push_back(f.dim);
  Json summary;
  bool pass = true;

  if (cfg.has_suite("inequality"))
    for (int x : m)
      if (x < 2) throw PreconditionError("key inequality requested but a factor has dimension 1; it needs m_i >= 2 for all i");

  if (cfg.has_suite("lemma")) {
    print_tolerance(log, "lemma", "relative residual <= " + format_double(tol.change_of_vars));
    CsvTable t({"tuple", "nodes", "factor", "max_abs", "relative"});
    double worst = 0.0;
    for (size_t r = 0; r < cfg.ladder.size(); ++r) {
      const int N = cfg.ladder[r];
      auto g = build_geometry(cfg, N);
      // 20 tuples on the first rung, the first tuple again on the others
      const int tuples = r == 0 ? 20 : 1;
      for (int k = 0; k < tuples; ++k) {
        Rng rng(mix_seed(cfg.seed, 1000 + k));
        auto spec = ChangeOfVarsSpec::random(l, rng);
        auto fields = default_fields(l, TemplateKind::exp_trig, mix_seed(cfg.seed, 2000 + k));
        auto F = build_fields(g, fields);
        for (int i = 0; i < l; ++i) {
          auto res = change_of_variables_check(spec, F, i);
          worst = std::max(worst, res.relative);
          t.add({double(k), double(N), double(i), res.max_abs, res.relative});
        }
      }
    }
    const bool ok = worst <= tol.change_of_vars;
    log << "[lemma] worst relative residual " << format_double(worst) << (ok ? " PASS" : " FAIL") << "\n";
    out.write_csv("change_of_variables.csv", t);
    summary["lemma"] = Json{{"worst_relative", worst}, {"pass", ok}};
    pass = pass && ok;
  }

  if (cfg.has_suite("bmatrix")) {
    Json spectra = Json::array();
    for (const auto& q : cfg.q)
      for (int i = 0; i < l; ++i) {
        Json e = b_matrix_json(b_matrix(i, q, m));
        e["displayed"] = b_matrix_json(b_matrix(i, q, m, BForm::displayed));
        spectra.push_back(e);
      }
    out.write_json("b_matrices.json", spectra);
    log << "[bmatrix] " << spectra.size() << " spectra written\n";
  }

  if (cfg.has_suite("bsuite")) {
    print_tolerance(log, "bsuite", "quadratic form relative residual <= " + format_double(tol.quadratic_form));
    auto r = b_matrix_suite(1000000, cfg.seed);
    const bool ok = r.failures == 0 && r.min_margin > 0 && r.worst_quadratic <= tol.quadratic_form && r.counterexample_not_negative;
    log << "[bsuite] " << r.matrices << " matrices, " << r.failures << " not negative definite, min margin " << format_double(r.min_margin)
        << ", " << r.vectors << " vectors worst " << format_double(r.worst_quadratic) << ", m=(1,2) "
        << r.counterexample["definiteness"].get<std::string>() << (ok ? " PASS" : " FAIL") << "\n";
    summary["bsuite"] = Json{{"matrices", r.matrices},     {"failures", r.failures},
                             {"min_margin", r.min_margin}, {"vectors", r.vectors},
                             {"worst_quadratic", r.worst_quadratic}, {"counterexample", r.counterexample},
                             {"pass", ok}};
    pass = pass && ok;
  }

  const bool want_rho = cfg.has_suite("rho"), want_key = cfg.has_suite("key");
  if (want_rho || want_key) {
    print_tolerance(log, "rho/key", "order >= " + format_double(tol.min_order) + ", final relative residual <= " + format_double(tol.identity_final));
    CsvTable t({"h", "nodes", "q_index", "identity", "factor", "lhs", "rhs", "residual"});
    // residual ladders per (q, identity, factor)
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> ladders;
    std::map<std::string, double> scales;
    for (int N : cfg.ladder) {
      auto g = build_geometry(cfg, N);
      QuadratureRule rule(g);
      auto F = build_fields(g, cfg.fields);
      for (size_t qi = 0; qi < cfg.q.size(); ++qi) {
        auto add = [&](const std::string& key, int id, int i, const IntegralCheck& c) {
          t.add({c.h, double(N), double(qi), double(id), double(i), c.lhs, c.rhs, c.residual});
          ladders[key].first.push_back(c.h);
          ladders[key].second.push_back(c.residual);
          scales[key] = std::max({1.0, std::abs(c.lhs), std::abs(c.rhs)});
        };
        if (want_rho) {
          auto checks = integral_rho_identity(F, cfg.q[qi], rule);
          for (int i = 0; i < l; ++i) add("rho q" + std::to_string(qi) + " i" + std::to_string(i), 0, i, checks[i]);
        }
        if (want_key) add("key q" + std::to_string(qi), 1, -1, key_integral_formula(F, cfg.q[qi], rule));
      }
      log << "[rho/key] N=" << N << " done\n";
    }
    Json js;
    for (auto& [key, lad] : ladders) {
      std::vector<double> rel;
      for (double r : lad.second) rel.push_back(r / scales[key]);
      auto v = judge_ladder(lad.first, rel, tol.identity_final, tol.min_order, 1e-12);
      log << "[" << key << "] residuals";
      for (double r : lad.second) log << " " << format_double(r);
      if (v.order_checked) log << " order " << format_double(v.order);
      log << (v.pass ? " PASS" : " FAIL") << "\n";
      js[key] = verdict_json(v);
      js[key]["final_residual"] = lad.second.back();
      pass = pass && v.pass;
    }
    out.write_csv("integral_identities.csv", t);
    summary["integral_identities"] = js;
  }

  if (cfg.has_suite("inequality")) {
    print_tolerance(log, "inequality", "value < 0 for nonconstant F, |value| <= " + format_double(tol.key_inequality) + " for constant F");
    auto g = build_geometry(cfg, cfg.ladder.back());
    QuadratureRule rule(g);
    auto F = build_fields(g, cfg.fields);
    auto k = key_inequality(F, rule, tol.key_inequality);
    const bool constant = all_constant(cfg.fields);
    const bool ok = constant ? std::abs(k.value) <= tol.key_inequality : k.value < 0;
    log << "[inequality] value " << format_double(k.value) << " max gradient " << format_double(k.max_gradient) << (ok ? " PASS" : " FAIL")
        << "\n";
    summary["inequality"] = Json{{"value", k.value}, {"max_gradient", k.max_gradient}, {"constant_fields", constant}, {"pass", ok}};
    pass = pass && ok;
  }

  if (cfg.has_suite("permutation")) {
    print_tolerance(log, "permutation", "two-sum right hand side >= 0 and R~ not everywhere nonpositive");
    CsvTable t({"h", "nodes", "lhs", "rhs", "residual", "min_scalar", "max_scalar"});
    Json js;
    bool ok = true;
    for (int N : cfg.ladder) {
      auto g = build_geometry(cfg, N);
      QuadratureRule rule(g);
      auto F = build_fields(g, cfg.fields);
      auto blocks = product_curvature(g);
      auto c = permutation_nonnegativity(F, blocks, rule);
      double base_min = 1e300;
      for (const auto& fc : factor_curvatures(*g)) base_min = std::min(base_min, *std::min_element(fc.scalar.begin(), fc.scalar.end()));
      t.add({g->h_max(), double(N), c.lhs, c.rhs, c.lhs - c.rhs, c.min_scalar, c.max_scalar});
      log << "[permutation] N=" << N << " lhs " << format_double(c.lhs) << " rhs " << format_double(c.rhs) << " R~ in ["
          << format_double(c.min_scalar) << ", " << format_double(c.max_scalar) << "]\n";
      js["sigma"] = c.sigma;
      js["q"] = c.q;
      js["rhs"] = c.rhs;
      js["min_scalar"] = c.min_scalar;
      js["max_scalar"] = c.max_scalar;
      js["base_scalar_nonnegative"] = base_min >= -1e-8;
      ok = c.rhs_nonnegative && c.sign_consistent;
    }
    js["pass"] = ok;
    log << "[permutation] " << (ok ? "PASS" : "FAIL") << "\n";
    out.write_csv("permutation.csv", t);
    summary["permutation"] = js;
    pass = pass && ok;
  }

  if (cfg.has_suite("variation")) {
    print_tolerance(log, "variation", "relative <= " + format_double(tol.first_variation) + ", critical metrics |dE/dt| <= " +
                                          format_double(tol.einstein) + " * scale");
    auto g = build_geometry(cfg, cfg.ladder.back());
    QuadratureRule rule(g);
    auto F = build_fields(g, cfg.fields);
    auto metric = deformed_metric(g, F);
    auto crit = criticality_multiconformal(metric, rule, tol.constancy);
    CsvTable t({"direction", "fd", "richardson", "formula", "relative", "scale"});
    bool ok = true;
    for (int s = 0; s < 3; ++s) {
      auto h = random_direction(g, mix_seed(cfg.seed, 3000 + s));
      auto fv = first_variation_check(metric, h, rule, 1e-4, tol.constancy);
      t.add({double(s), fv.fd, fv.richardson, fv.formula, fv.relative, fv.scale});
      const bool d_ok = crit.critical ? std::abs(fv.richardson) <= tol.einstein * fv.scale && std::abs(fv.formula) <= tol.einstein * fv.scale
                                      : fv.relative <= tol.first_variation;
      log << "[variation] direction " << s << " fd " << format_double(fv.richardson) << " formula " << format_double(fv.formula)
          << " scale " << format_double(fv.scale) << (d_ok ? " PASS" : " FAIL") << "\n";
      ok = ok && d_ok;
    }
    out.write_csv("first_variation.csv", t);
    summary["variation"] = Json{{"critical", crit.critical}, {"c", crit.c}, {"pass", ok}};
    pass = pass && ok;
  }

  summary["tolerances"] = tol.to_json();
  out.write_json("summary.json", summary);
  return pass ? kPass : kVerificationFailure;
}

// ---------------------------------------------------------------------------

inline Json trichotomy_json(const TrichotomyReport& r) {
  Json j;
  j["case"] = r.case_id;
  j["factors"] = Json::array();
  for (const auto& f : r.factors) {
    Json e{{"label", f.label}, {"dim", f.dim}, {"mu_sign", f.mu_sign}};
    e["lambda0"] = f.lambda0 ? Json(*f.lambda0) : Json(nullptr);
    if (f.mu) e["mu"] = *f.mu;
    e["min_scalar"] = f.min_scalar;
    j["factors"].push_back(e);
  }
  j["witness"] = r.witness ? Json(*r.witness) : Json(nullptr);
  if (r.witness) j["witness_min_scalar"] = r.witness_min_scalar;
  return j;
}

inline int cmd_classify(const RunConfig& cfg, RunDirectory& out, std::ostream& log) {
  print_tolerance(log, "classify", "|lambda0| <= " + format_double(cfg.tol.trichotomy_zero) + " counts as zero");
  auto g = build_geometry(cfg, cfg.ladder.back());
  auto r = classify_trichotomy(*g, cfg.tol.trichotomy_zero);
  auto j = trichotomy_json(r);
  for (const auto& f : j["factors"]) log << "[classify] " << f.dump() << "\n";
  log << "[classify] case " << r.case_id << "\n";
  out.write_json("trichotomy.json", j);
  return kPass;
}

// ---------------------------------------------------------------------------

inline int cmd_divergence(const RunConfig& cfg, RunDirectory& out, std::ostream& log) {
  const auto& tol = cfg.tol;
  print_tolerance(log, "divergence", "slope within " + format_double(tol.slope) + " relative, scaled difference <= " +
                                         format_double(tol.shrink_difference));
  auto g = build_geometry(cfg, cfg.ladder.back());
  QuadratureRule rule(g);
  auto blocks = product_curvature(g);
  auto sc = sin_construction(g, blocks, rule, cfg.alpha.value_or(0.0), cfg.beta);
  log << "[divergence] alpha " << format_double(sc.alpha) << " beta " << format_double(sc.beta) << " gamma " << format_double(sc.gamma)
      << " hypothesis " << format_double(sc.hypothesis) << "\n";
  auto r = shrink_divergence(sc.F, 0, cfg.epsilons, blocks, rule);
  CsvTable t({"eps", "E", "E_direct", "scaled_difference"});
  double worst = 0.0;
  for (const auto& row : r.rows) {
    t.add({row.eps, row.E_decomposed, row.E_direct, row.scaled_difference});
    worst = std::max(worst, row.scaled_difference);
  }
  out.write_csv("divergence.csv", t);
  const bool slope_ok = r.fitted >= 2 && std::abs(r.slope - r.exponent) <= tol.slope * std::abs(r.exponent);
  const bool diff_ok = worst <= tol.shrink_difference;
  log << "[divergence] slope " << format_double(r.slope) << " expected " << format_double(r.exponent) << ", worst scaled difference "
      << format_double(worst) << ((slope_ok && diff_ok) ? " PASS" : " FAIL") << "\n";
  Json j{{"alpha", sc.alpha},   {"beta", sc.beta},        {"gamma", sc.gamma},     {"hypothesis", r.hypothesis},
         {"A", r.A},            {"B", r.B},               {"slope", r.slope},      {"expected_slope", r.exponent},
         {"fitted", r.fitted},  {"worst_scaled_difference", worst}, {"pass", slope_ok && diff_ok},
         {"tolerances", tol.to_json()}};
  out.write_json("summary.json", j);
  return slope_ok && diff_ok ? kPass : kVerificationFailure;
}

// ---------------------------------------------------------------------------

// Runs one command into cfg.out and writes the manifest.  Exceptions map to
// exit codes here so every entry point behaves the same.
inline int run_command(const RunConfig& raw, std::ostream& log, std::ostream& err) {
  int code = kPass;
  std::optional<RunDirectory> out;
  Json echo;
  try {
    RunConfig cfg = with_defaults(raw);
    echo = cfg.to_json();
    out.emplace(cfg.out);
    for (const auto& [name, content] : cfg.inputs) out->add_input(name, content);
    out->add_input("config", echo.dump());
    if (cfg.command == "verify-curvature") code = cmd_verify_curvature(cfg, *out, log);
    else if (cfg.command == "verify-identities") code = cmd_verify_identities(cfg, *out, log);
    else if (cfg.command == "classify") code = cmd_classify(cfg, *out, log);
    else if (cfg.command == "divergence") code = cmd_divergence(cfg, *out, log);
    else throw ConfigError("unknown command '" + cfg.command + "'");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    code = kConfigError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    code = kConfigError;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << "\n";
    code = kPreconditionError;
  } catch (const Error& e) {
    err << "verification failed: " << e.what() << "\n";
    code = kVerificationFailure;
  }
  if (out) {
    try {
      out->write_manifest(echo, code);
    } catch (const Error& e) {
      err << "cannot write manifest: " << e.what() << "\n";
    }
  }
  return code;
}

}  // namespace multiconf
