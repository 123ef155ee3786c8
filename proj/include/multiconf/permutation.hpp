#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "variational.hpp"

namespace multiconf {

struct PermutationTypeSpec {
  // pattern[k][j]: f_j varies along factor k  (d_k f_j != 0)
  std::vector<std::vector<bool>> pattern;
  std::vector<std::vector<double>> magnitude;  // max node |d_a f_j| over axes a of factor k
  bool constant = false;
  bool off_diagonal = false;  // no f_i varies along its own factor
  bool permutation_type = false;
  std::optional<std::vector<int>> sigma;  // f_i depends on factor sigma[i] only
  std::string classification;             // constant | off_diagonal | permutation_type | general

  bool has_fixed_point() const {
    if (!sigma) return false;
    for (size_t i = 0; i < sigma->size(); ++i)
      if ((*sigma)[i] == static_cast<int>(i)) return true;
    return false;
  }
};

// Complete a partial assignment (-1 = free) to a bijection, preferring no
// fixed points.  Returns nullopt if the fixed part is not injective.
inline std::optional<std::vector<int>> complete_permutation(const std::vector<int>& partial) {
  const int l = static_cast<int>(partial.size());
  std::vector<bool> used(l, false);
  for (int x : partial)
    if (x >= 0) {
      if (used[x]) return std::nullopt;
      used[x] = true;
    }
  std::vector<int> best;
  int best_fixed = l + 1;
  std::vector<int> free_targets;
  for (int k = 0; k < l; ++k)
    if (!used[k]) free_targets.push_back(k);
  std::sort(free_targets.begin(), free_targets.end());
  do {
    std::vector<int> s = partial;
    int t = 0, fixed = 0;
    for (int i = 0; i < l; ++i) {
      if (s[i] < 0) s[i] = free_targets[t++];
      fixed += s[i] == i;
    }
    if (fixed < best_fixed) {
      best_fixed = fixed;
      best = s;
    }
    if (fixed == 0) break;
  } while (std::next_permutation(free_targets.begin(), free_targets.end()));
  return best;
}

// pattern_tol is relative: entry (k, j) is set when max |d_a f_j| over the
// axes of factor k exceeds pattern_tol * max |f_j|.
inline PermutationTypeSpec classify_type(const MulticonformalFactors& F, double pattern_tol = 1e-8) {
  const auto& g = F.geometry();
  const int l = g.num_factors();
  PermutationTypeSpec s;
  s.pattern.assign(l, std::vector<bool>(l, false));
  s.magnitude.assign(l, std::vector<double>(l, 0.0));
  for (int j = 0; j < l; ++j) {
    const double scale = F.f(j).max_abs();
    for (int k = 0; k < l; ++k) {
      double mx = 0.0;
      for (int a = g.block_offset(k); a < g.block_offset(k) + g.block_size(k); ++a)
        mx = std::max(mx, partial_derivative(F.f(j), a).max_abs());
      s.magnitude[k][j] = mx;
      s.pattern[k][j] = mx > pattern_tol * scale;
    }
  }
  s.constant = true;
  s.off_diagonal = true;
  for (int k = 0; k < l; ++k)
    for (int j = 0; j < l; ++j) {
      if (s.pattern[k][j]) s.constant = false;
      if (k == j && s.pattern[k][j]) s.off_diagonal = false;
    }
  // each f_j varies along at most one factor, each factor carries at most one f_j
  std::vector<int> partial(l, -1);
  bool ok = true;
  for (int j = 0; j < l && ok; ++j)
    for (int k = 0; k < l; ++k)
      if (s.pattern[k][j]) {
        if (partial[j] >= 0) ok = false;
        partial[j] = k;
      }
  if (ok) {
    auto sigma = complete_permutation(partial);
    if (sigma) {
      s.permutation_type = true;
      s.sigma = sigma;
    }
  }
  if (s.constant)
    s.classification = "constant";
  else if (s.permutation_type && s.off_diagonal)
    s.classification = "off_diagonal";
  else if (s.permutation_type)
    s.classification = "permutation_type";
  else
    s.classification = "general";
  return s;
}

struct PermutationCertificate {
  std::vector<int> sigma;
  std::vector<double> q;
  double lhs = 0.0;  // int (R^gt - sum R_i/f_i^2) prod f^q
  double rhs = 0.0;  // the two-sum gradient form
  double weighted_curvature = 0.0;  // int R^gt prod f^q
  double weighted_base = 0.0;       // int sum R_i/f_i^2 prod f^q
  double min_scalar = 0.0, max_scalar = 0.0;  // of R^gt over nodes
  bool rhs_nonnegative = false;
  // R^gt <= 0 everywhere with a strict negative somewhere would contradict
  // the nonnegative right hand side when R^g >= 0
  bool sign_consistent = false;
};

inline std::vector<double> large_q(const ProductGeometry& g) {
  std::vector<double> q;
  for (int i = 0; i < g.num_factors(); ++i) q.push_back(g.block_size(i) + 2.0);
  return q;
}

inline PermutationCertificate permutation_nonnegativity(const MulticonformalFactors& F, const CurvatureBundle& blocks,
                                                        const QuadratureRule& rule, std::optional<std::vector<double>> q = std::nullopt,
                                                        double pattern_tol = 1e-8) {
  const auto& g = F.geometry();
  require_same_geometry(g, *blocks.geometry);
  auto type = classify_type(F, pattern_tol);
  if (!type.permutation_type) throw PreconditionError("factors are not of permutation type (pattern is " + type.classification + ")");
  if (type.has_fixed_point())
    throw PreconditionError("some f_i varies along its own factor; split that factor off before certifying");
  const int l = g.num_factors();
  auto m = factor_dims(g);
  PermutationCertificate c;
  c.sigma = *type.sigma;
  c.q = q ? *q : large_q(g);
  if (static_cast<int>(c.q.size()) != l) throw StructuralError("q has the wrong length");
  c.min_scalar = 1e300;
  c.max_scalar = -1e300;
  JetEvaluator je(g, field_pointers(F));
  Jet J;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    const double w = rule.node_weight(p) * weight_power(J, c.q, l);
    double diff = 0.0, base = 0.0, r = 0.0;
    for (int i = 0; i < l; ++i) {
      const double fi = J.f[i], mi = m[i];
      diff += rho_at(J, m.data(), l, i) / (fi * fi);
      base += blocks.scalar_blocks[i][p] / (fi * fi);
      r += (mi - 1) * (2 * c.q[i] - mi - 2) * J.ip[i][i][i] / (fi * fi * fi * fi);
      for (int j = 0; j < l; ++j)
        if (j != i) r += m[j] * (2 * c.q[j] - m[j] - 1) * J.ip[i][j][j] / (fi * fi * J.f[j] * J.f[j]);
    }
    c.lhs += w * diff;
    c.rhs += w * r;
    c.weighted_base += w * base;
    c.weighted_curvature += w * (diff + base);
    c.min_scalar = std::min(c.min_scalar, diff + base);
    c.max_scalar = std::max(c.max_scalar, diff + base);
  });
  c.rhs_nonnegative = c.rhs >= 0.0;
  c.sign_consistent = !(c.max_scalar <= 0.0 && c.min_scalar < 0.0);
  return c;
}

struct YangFactor {
  int i = 0;
  int source = 0;        // sigma^{-1}(i)
  double mean = 0.0;     // c_i
  double variance = 0.0; // relative weighted variance of the bracket
};

struct YangReport {
  std::vector<YangFactor> factors;
  double scalar_variance = 0.0;  // relative variance of R^gt
  bool hypothesis_met = false;   // R^gt constant and every f_i nonconstant
  bool conclusion_holds = true;  // when the hypothesis is met: all c_i ~ 0
};

inline YangReport yang_separation_check(const MulticonformalFactors& F, const CurvatureBundle& blocks, const QuadratureRule& rule,
                                        double constancy_tol = 1e-6, double pattern_tol = 1e-8) {
  const auto& g = F.geometry();
  auto type = classify_type(F, pattern_tol);
  if (!type.permutation_type) throw PreconditionError("factors are not of permutation type (pattern is " + type.classification + ")");
  if (type.has_fixed_point()) throw PreconditionError("Yang's separation needs sigma(i) != i for every i");
  const int l = g.num_factors();
  auto m = factor_dims(g);
  const auto& sigma = *type.sigma;
  std::vector<int> inv(l);
  for (int i = 0; i < l; ++i) inv[sigma[i]] = i;
  std::vector<ScalarField> bracket;
  for (int i = 0; i < l; ++i) bracket.emplace_back(F.geometry_ptr());
  ScalarField R(F.geometry_ptr());
  JetEvaluator je(g, field_pointers(F));
  Jet J;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    double s = 0.0;
    for (int i = 0; i < l; ++i) {
      const int k = inv[i];
      const double fk = J.f[k], mk = m[k], fs = J.f[sigma[i]];
      double b = blocks.scalar_blocks[i][p] - 2 * mk * J.lap[i][k] / fk - mk * (mk - 1) * J.ip[i][k][k] / (fk * fk);
      bracket[i][p] = fs * fs * b;
      s += (blocks.scalar_blocks[i][p] + rho_at(J, m.data(), l, i)) / (J.f[i] * J.f[i]);
    }
    R[p] = s;
  });
  YangReport y;
  y.scalar_variance = relative_variance(R, rule);
  bool all_nonconstant = true;
  for (int i = 0; i < l; ++i) {
    bool varies = false;
    for (int k = 0; k < l; ++k) varies = varies || type.pattern[k][i];
    all_nonconstant = all_nonconstant && varies;
    YangFactor f;
    f.i = i;
    f.source = inv[i];
    f.mean = mean_of(bracket[i], rule);
    f.variance = relative_variance(bracket[i], rule);
    y.factors.push_back(f);
  }
  y.hypothesis_met = y.scalar_variance <= constancy_tol && all_nonconstant;
  if (y.hypothesis_met)
    for (const auto& f : y.factors) y.conclusion_holds = y.conclusion_holds && std::abs(f.mean) <= std::sqrt(constancy_tol);
  return y;
}

}  // namespace multiconf
