#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "multiconformal.hpp"
#include "quadrature.hpp"

namespace multiconf {

// ---------------------------------------------------------------------------
// change of dependent variables

struct ChangeOfVarsSpec {
  Eigen::VectorXd a;
  Eigen::MatrixXd B;
  Eigen::MatrixXd P;

  int size() const { return static_cast<int>(a.size()); }

  void validate(double tol = 1e-12) const {
    const int l = size();
    if (B.rows() != l || B.cols() != l || P.rows() != l || P.cols() != l)
      throw StructuralError("change of variables: a, B, P sizes disagree");
    if ((B - B.transpose()).cwiseAbs().maxCoeff() > tol * (1.0 + B.cwiseAbs().maxCoeff()))
      throw DomainError("change of variables: B is not symmetric");
    double err = (P.transpose() * P - Eigen::MatrixXd::Identity(l, l)).cwiseAbs().maxCoeff();
    if (err > tol) throw DomainError("change of variables: P is not orthogonal (|P^T P - I| = " + std::to_string(err) + ")");
  }
  Eigen::VectorXd kappa() const { return P * a; }
  Eigen::MatrixXd Lambda() const {
    Eigen::MatrixXd A = a.asDiagonal();
    return P * (A + B) * P.transpose();
  }

  static ChangeOfVarsSpec random(int l, Rng& rng) {
    ChangeOfVarsSpec s;
    s.a.resize(l);
    s.B.resize(l, l);
    for (int j = 0; j < l; ++j) s.a[j] = rng.uniform(-3, 3);
    for (int j = 0; j < l; ++j)
      for (int k = j; k < l; ++k) s.B(j, k) = s.B(k, j) = rng.uniform(-3, 3);
    Eigen::MatrixXd X(l, l);
    for (int j = 0; j < l; ++j)
      for (int k = 0; k < l; ++k) X(j, k) = rng.uniform(-1, 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    s.P = qr.householderQ();
    return s;
  }
};

inline Eigen::MatrixXd rotation(double angle) {
  Eigen::MatrixXd P(2, 2);
  P << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return P;
}

struct ChangeOfVarsResult {
  double max_abs = 0.0;   // max node |lhs - rhs|
  double scale = 0.0;     // max node |lhs| (plus the magnitude of the summands)
  double relative = 0.0;  // max_abs / scale
};

// Both sides along E_i.  The Latin side works with u_j = log f_j, using
// Delta f / f = Delta u + |du|^2 and df / f = du; the Greek side
// differentiates the fields psi_a = sum_j p_aj u_j directly.
inline ChangeOfVarsResult change_of_variables_check(const ChangeOfVarsSpec& spec, const MulticonformalFactors& F, int i) {
  spec.validate();
  const auto& g = F.geometry();
  const int l = F.size();
  if (spec.size() != l) throw StructuralError("change of variables: spec size differs from the number of factors");
  check_factor(g, i);
  const auto kap = spec.kappa();
  const auto Lam = spec.Lambda();
  std::vector<std::vector<double>> psi(l, std::vector<double>(g.num_nodes(), 0.0));
  for (int al = 0; al < l; ++al)
    for (long long p = 0; p < g.num_nodes(); ++p) {
      double s = 0.0;
      for (int j = 0; j < l; ++j) s += spec.P(al, j) * F.log_f(j)[p];
      psi[al][p] = s;
    }
  std::vector<const double*> ptr;
  for (int j = 0; j < l; ++j) ptr.push_back(F.log_f(j).data());
  for (int al = 0; al < l; ++al) ptr.push_back(psi[al].data());
  if (2 * l > kMaxFactors) throw StructuralError("change of variables: too many factors");
  JetEvaluator je(g, ptr);
  Jet J;
  ChangeOfVarsResult r;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    double lhs = 0.0, mag = 0.0;
    for (int j = 0; j < l; ++j) {
      double t = spec.a[j] * (J.lap[i][j] + J.ip[i][j][j]);
      lhs += t;
      mag += std::abs(t);
      for (int k = 0; k < l; ++k) {
        double s = spec.B(j, k) * J.ip[i][j][k];
        lhs += s;
        mag += std::abs(s);
      }
    }
    double rhs = 0.0;
    for (int al = 0; al < l; ++al) {
      rhs += kap[al] * J.lap[i][l + al];
      for (int be = 0; be < l; ++be) rhs += Lam(al, be) * J.ip[i][l + al][l + be];
    }
    r.max_abs = std::max(r.max_abs, std::abs(lhs - rhs));
    r.scale = std::max(r.scale, mag);
  });
  r.relative = r.scale > 0.0 ? r.max_abs / r.scale : r.max_abs;
  return r;
}

// ---------------------------------------------------------------------------
// B^i(q)

enum class Definiteness { negative, positive, indefinite, semidefinite };

inline std::string definiteness_name(Definiteness d) {
  switch (d) {
    case Definiteness::negative: return "negative";
    case Definiteness::positive: return "positive";
    case Definiteness::indefinite: return "indefinite";
    case Definiteness::semidefinite: return "semidefinite";
  }
  return "?";
}

// derived: the coefficients that come out of integrating rho_i by parts
// displayed: the matrix as typeset; it differs off the i-th diagonal entry
// unless m_i q_j = m_j q_i
enum class BForm { derived, displayed };

struct BMatrix {
  int i = 0;
  std::vector<double> q;
  std::vector<int> m;
  Eigen::MatrixXd entries;
  bool exact = false;  // assembled in integer arithmetic
  std::vector<double> eigenvalues;
  Definiteness definiteness = Definiteness::indefinite;
  double margin = 0.0;

  double quadratic_form(const Eigen::VectorXd& x) const { return x.dot(entries * x); }
};

namespace detail {
template <class T>
T b_entry(int i, int j, int k, const std::vector<int>& m, const std::vector<T>& q, BForm form) {
  if (form == BForm::displayed) {
    T v = -(T(m[j]) * m[k] - T(m[j]) * q[k] - T(m[k]) * q[j]);
    if (j == i && k == i) return v - (T(m[i]) + 2 * q[i] - 2);
    if (j == k) return v - T(m[j]);
    if (j == i) return v - ((T(m[i]) + 1) * q[k] - T(m[k]) * q[i]);
    if (k == i) return v - ((T(m[i]) + 1) * q[j] - T(m[j]) * q[i]);
    return v;
  }
  if (j == i && k == i) return (T(m[i]) - 1) * (2 * q[i] - m[i] - 2);
  if (j == k) return T(m[j]) * (2 * q[j] - m[j] - 1);
  if (j == i || k == i) {
    int o = j == i ? k : j;
    return T(m[i]) * q[o] + q[i] * m[o] - T(m[i]) * m[o] - q[o];
  }
  return T(m[j]) * q[k] + T(m[k]) * q[j] - T(m[j]) * m[k];
}
}  // namespace detail

inline BMatrix b_matrix(int i, const std::vector<double>& q, const std::vector<int>& m, BForm form = BForm::derived) {
  const int l = static_cast<int>(m.size());
  if (static_cast<int>(q.size()) != l) throw StructuralError("b_matrix: q and m sizes differ");
  if (i < 0 || i >= l) throw IndexError("b_matrix: factor index out of range");
  for (int x : m)
    if (x < 1) throw DomainError("b_matrix: dimensions must be positive");
  BMatrix B;
  B.i = i;
  B.q = q;
  B.m = m;
  B.entries.resize(l, l);
  bool integral = true;
  for (double x : q)
    if (x != std::round(x) || std::abs(x) > 1e9) integral = false;
  B.exact = integral;
  if (integral) {
    std::vector<long long> qi(q.begin(), q.end());
    for (int j = 0; j < l; ++j)
      for (int k = 0; k < l; ++k) B.entries(j, k) = static_cast<double>(detail::b_entry<long long>(i, j, k, m, qi, form));
  } else {
    for (int j = 0; j < l; ++j)
      for (int k = 0; k < l; ++k) B.entries(j, k) = detail::b_entry<double>(i, j, k, m, q, form);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B.entries, Eigen::EigenvaluesOnly);
  for (int k = 0; k < l; ++k) B.eigenvalues.push_back(es.eigenvalues()[k]);
  const double thr = 1e-10 * std::max(1.0, B.entries.norm());
  const double lo = B.eigenvalues.front(), hi = B.eigenvalues.back();
  if (hi < -thr)
    B.definiteness = Definiteness::negative;
  else if (lo > thr)
    B.definiteness = Definiteness::positive;
  else if (lo < -thr && hi > thr)
    B.definiteness = Definiteness::indefinite;
  else
    B.definiteness = Definiteness::semidefinite;
  B.margin = std::abs(B.eigenvalues.front());
  for (double e : B.eigenvalues) B.margin = std::min(B.margin, std::abs(e));
  return B;
}

// <x, B^i(0) x> + (sum m_j x_j)^2 + sum (m_j - 2 delta_ij) x_j^2, worst
// |.| / |x|^2 over n seeded random vectors
inline double quadratic_form_residual(int i, const std::vector<int>& m, long long n, std::uint64_t seed) {
  const int l = static_cast<int>(m.size());
  auto B = b_matrix(i, std::vector<double>(l, 0.0), m);
  Rng rng(seed);
  Eigen::VectorXd x(l);
  double worst = 0.0;
  for (long long t = 0; t < n; ++t) {
    double s = 0.0, d = 0.0, nn = 0.0;
    for (int j = 0; j < l; ++j) {
      x[j] = rng.uniform(-1, 1);
      s += m[j] * x[j];
      d += (m[j] - (j == i ? 2.0 : 0.0)) * x[j] * x[j];
      nn += x[j] * x[j];
    }
    double r = B.quadratic_form(x) + s * s + d;
    worst = std::max(worst, std::abs(r) / nn);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// integral identities

struct IntegralCheck {
  double lhs = 0.0, rhs = 0.0, residual = 0.0, h = 0.0;
};

inline double weight_power(const Jet& J, const std::vector<double>& q, int l) {
  double w = 1.0;
  for (int j = 0; j < l; ++j)
    if (q[j] != 0.0) w *= std::pow(J.f[j], q[j]);
  return w;
}

// int rho_i / f_i^2 prod f^q  vs the gradient-only form, per i
inline std::vector<IntegralCheck> integral_rho_identity(const MulticonformalFactors& F, const std::vector<double>& q,
                                                        const QuadratureRule& rule) {
  const auto& g = F.geometry();
  require_same_geometry(g, rule.geometry());
  const int l = g.num_factors();
  if (static_cast<int>(q.size()) != l) throw StructuralError("q has the wrong length");
  auto m = factor_dims(g);
  std::vector<IntegralCheck> out(l);
  JetEvaluator je(g, field_pointers(F));
  Jet J;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    const double w = rule.node_weight(p) * weight_power(J, q, l);
    for (int i = 0; i < l; ++i) {
      const double fi = J.f[i], mi = m[i];
      out[i].lhs += w * rho_at(J, m.data(), l, i) / (fi * fi);
      double r = (mi - 1) * (2 * q[i] - mi - 2) * J.ip[i][i][i] / (fi * fi * fi * fi);
      for (int j = 0; j < l; ++j) {
        if (j == i) continue;
        const double fj = J.f[j];
        r += m[j] * (2 * q[j] - m[j] - 1) * J.ip[i][j][j] / (fi * fi * fj * fj);
        r += 2 * (mi * q[j] + q[i] * m[j] - mi * m[j] - q[j]) * J.ip[i][i][j] / (fi * fi * fi * fj);
        for (int k = 0; k < l; ++k) {
          if (k == i || k == j) continue;
          r += (m[j] * q[k] + q[j] * m[k] - double(m[j]) * m[k]) * J.ip[i][j][k] / (fi * fi * fj * J.f[k]);
        }
      }
      out[i].rhs += w * r;
    }
  });
  for (auto& c : out) {
    c.residual = c.lhs - c.rhs;
    c.h = g.h_max();
  }
  return out;
}

// The q = m specialisation for F = exp(a_j o phi) with phi depending on
// factor i only: returns the simplified right hand side for that i.
inline double integral_rho_simplified(const MulticonformalFactors& F, const ScalarField& phi, const std::vector<ScalarField>& a_prime,
                                      int i, const QuadratureRule& rule) {
  const auto& g = F.geometry();
  const int l = g.num_factors();
  auto m = factor_dims(g);
  std::vector<const double*> ptr{phi.data()};
  JetEvaluator je(g, ptr, false);
  Jet J;
  double s = 0.0;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    const double gp = J.ip[i][0][0];
    double wq = 1.0;
    for (int j = 0; j < l; ++j) wq *= std::pow(F.f(j)[p], m[j]);
    wq /= F.f(i)[p] * F.f(i)[p];
    const double ai = a_prime[i][p];
    double c = (m[i] - 1.0) * (m[i] - 2.0) * ai * ai;
    for (int j = 0; j < l; ++j) {
      if (j == i) continue;
      const double aj = a_prime[j][p];
      c += m[j] * (m[j] - 1.0) * aj * aj;
      c += 2.0 * (m[i] - 1.0) * m[j] * ai * aj;
      for (int k = 0; k < l; ++k) {
        if (k == i || k == j) continue;
        c += double(m[j]) * m[k] * aj * a_prime[k][p];
      }
    }
    s += rule.node_weight(p) * wq * c * gp;
  });
  return s;
}

// int (R^gt - sum R_i/f_i^2) prod f^q  vs  sum_i int (sum_jk b^i_jk <..>/(f_j f_k)) prod f^q / f_i^2
// The left side uses sum_i rho_i / f_i^2, i.e. the closed form.
inline IntegralCheck key_integral_formula(const MulticonformalFactors& F, const std::vector<double>& q, const QuadratureRule& rule,
                                          BForm form = BForm::derived) {
  const auto& g = F.geometry();
  require_same_geometry(g, rule.geometry());
  const int l = g.num_factors();
  if (static_cast<int>(q.size()) != l) throw StructuralError("q has the wrong length");
  auto m = factor_dims(g);
  std::vector<Eigen::MatrixXd> B;
  for (int i = 0; i < l; ++i) B.push_back(b_matrix(i, q, m, form).entries);
  IntegralCheck c;
  JetEvaluator je(g, field_pointers(F));
  Jet J;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    const double w = rule.node_weight(p) * weight_power(J, q, l);
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < l; ++i) {
      const double fi2 = J.f[i] * J.f[i];
      lhs += rho_at(J, m.data(), l, i) / fi2;
      double s = 0.0;
      for (int j = 0; j < l; ++j)
        for (int k = 0; k < l; ++k) s += B[i](j, k) * J.ip[i][j][k] / (J.f[j] * J.f[k]);
      rhs += s / fi2;
    }
    c.lhs += w * lhs;
    c.rhs += w * rhs;
  });
  c.residual = c.lhs - c.rhs;
  c.h = g.h_max();
  return c;
}

struct KeyInequality {
  double value = 0.0;
  double tolerance = 0.0;
  double max_gradient = 0.0;
  bool holds = false;     // value <= tol
  bool equality = false;  // |value| <= tol and all gradients vanish
};

inline void require_dims_at_least_two(const ProductGeometry& g) {
  for (int i = 0; i < g.num_factors(); ++i)
    if (g.block_size(i) < 2)
      throw PreconditionError("factor " + std::to_string(i + 1) + " has dimension 1; the sign results need m_i >= 2 for all i");
}

inline KeyInequality key_inequality(const MulticonformalFactors& F, const QuadratureRule& rule, double tol = 1e-8) {
  const auto& g = F.geometry();
  require_same_geometry(g, rule.geometry());
  require_dims_at_least_two(g);
  const int l = g.num_factors();
  auto m = factor_dims(g);
  KeyInequality k;
  k.tolerance = tol;
  JetEvaluator je(g, field_pointers(F));
  Jet J;
  for_each_node(g, [&](long long p, const long long* loc) {
    je.eval(p, loc, J);
    double s = 0.0;
    for (int i = 0; i < l; ++i) {
      s += rho_at(J, m.data(), l, i) / (J.f[i] * J.f[i]);
      k.max_gradient = std::max(k.max_gradient, std::sqrt(std::max(0.0, J.ip[i][i][i])));
      for (int j = 0; j < l; ++j) k.max_gradient = std::max(k.max_gradient, std::sqrt(std::max(0.0, J.ip[j][i][i])));
    }
    k.value += rule.node_weight(p) * s;
  });
  k.holds = k.value <= tol;
  k.equality = std::abs(k.value) <= tol && k.max_gradient <= tol;
  return k;
}

}  // namespace multiconf
