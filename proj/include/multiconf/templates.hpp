#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fields.hpp"

namespace multiconf {

// Seeded stream with a platform-independent mapping to doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  std::uint64_t next() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a * 0x9E3779B97F4A7C15ull + b + 0x632BE59BD9B4E019ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

enum class TemplateKind { constant, trig_poly, exp_trig, sin_sqrt_alpha };

inline TemplateKind template_kind(const std::string& s) {
  if (s == "constant") return TemplateKind::constant;
  if (s == "trig-poly" || s == "trig_poly") return TemplateKind::trig_poly;
  if (s == "exp-trig" || s == "exp_trig") return TemplateKind::exp_trig;
  if (s == "sin-sqrt-alpha" || s == "sin_sqrt_alpha") return TemplateKind::sin_sqrt_alpha;
  throw ConfigError("unknown field template '" + s + "'");
}

inline std::string template_name(TemplateKind k) {
  switch (k) {
    case TemplateKind::constant: return "constant";
    case TemplateKind::trig_poly: return "trig-poly";
    case TemplateKind::exp_trig: return "exp-trig";
    case TemplateKind::sin_sqrt_alpha: return "sin-sqrt-alpha";
  }
  return "";
}

struct FieldTemplate {
  TemplateKind kind = TemplateKind::exp_trig;
  double value = 1.0;            // constant
  std::vector<int> depends_on;   // factors the field may vary along; empty = all
  int terms = 4;
  int max_freq = 3;
  double amplitude = 0.3;
  std::uint64_t seed = 1;
  double offset = 1.0;           // trig-poly: offset + poly
  double alpha = 1.0;            // sin-sqrt-alpha
  double coefficient = 1.0;
  int profile_factor = 0;
};

namespace detail {

struct Term {
  double amp;
  double phase;
  std::vector<std::vector<int>> k;  // per factor wave vector (empty if factor excluded)
};

inline std::vector<Term> draw_terms(const FieldTemplate& t, const ProductGeometry& g, const std::vector<int>& deps) {
  Rng rng(t.seed);
  std::vector<Term> terms;
  for (int s = 0; s < t.terms; ++s) {
    Term term;
    term.amp = t.amplitude / t.terms * rng.uniform(-1.0, 1.0);
    term.phase = rng.uniform(0.0, 2 * std::numbers::pi);
    term.k.resize(g.num_factors());
    bool nonzero = false;
    // redraw until the whole wave vector has euclidean norm <= max_freq
    for (;;) {
      int norm2 = 0;
      nonzero = false;
      for (int f : deps) {
        int nb = static_cast<int>(g.factor(f).basis(g.factor(f).point(0)).size());
        term.k[f].resize(nb);
        for (int c = 0; c < nb; ++c) {
          term.k[f][c] = rng.integer(-t.max_freq, t.max_freq);
          norm2 += term.k[f][c] * term.k[f][c];
          nonzero = nonzero || term.k[f][c] != 0;
        }
      }
      if (norm2 <= t.max_freq * t.max_freq) break;
    }
    if (!nonzero && !deps.empty()) {
      int f = deps[rng.integer(0, static_cast<int>(deps.size()) - 1)];
      term.k[f][rng.integer(0, static_cast<int>(term.k[f].size()) - 1)] = rng.integer(1, std::max(1, t.max_freq));
    }
    terms.push_back(std::move(term));
  }
  return terms;
}

}  // namespace detail

// Random trigonometric polynomial sum_t amp_t cos(sum_f k_tf . X_f + phase_t)
// with X_f the smooth basis coordinates of factor f.
inline ScalarField trig_polynomial(const GeometryPtr& gp, const FieldTemplate& t) {
  const auto& g = *gp;
  std::vector<int> deps = t.depends_on;
  if (deps.empty())
    for (int f = 0; f < g.num_factors(); ++f) deps.push_back(f);
  for (int f : deps)
    if (f < 0 || f >= g.num_factors()) throw ConfigError("field depends on unknown factor " + std::to_string(f));
  auto terms = detail::draw_terms(t, g, deps);
  // per factor, per term: exp(i k.X) at each factor node
  std::vector<std::vector<std::complex<double>>> fac(g.num_factors());
  const int nt = static_cast<int>(terms.size());
  for (int f = 0; f < g.num_factors(); ++f) {
    const auto& fg = g.factor(f);
    fac[f].assign(fg.num_nodes() * nt, 1.0);
    if (std::find(deps.begin(), deps.end(), f) == deps.end()) continue;
    for (long long k = 0; k < fg.num_nodes(); ++k) {
      auto x = fg.basis(fg.point(k));
      for (int s = 0; s < nt; ++s) {
        double a = 0.0;
        for (size_t c = 0; c < x.size(); ++c) a += terms[s].k[f][c] * x[c];
        fac[f][k * nt + s] = std::polar(1.0, a);
      }
    }
  }
  std::vector<std::complex<double>> phase(nt);
  for (int s = 0; s < nt; ++s) phase[s] = std::polar(1.0, terms[s].phase);
  ScalarField out(gp);
  long long loc[kMaxFactors];
  for (long long p = 0; p < g.num_nodes(); ++p) {
    g.locals(p, loc);
    double v = 0.0;
    for (int s = 0; s < nt; ++s) {
      double re = phase[s].real(), im = phase[s].imag();
      for (int f = 0; f < g.num_factors(); ++f) {
        const auto& w = fac[f][loc[f] * nt + s];
        const double r2 = re * w.real() - im * w.imag();
        im = re * w.imag() + im * w.real();
        re = r2;
      }
      v += terms[s].amp * re;
    }
    out[p] = v;
  }
  return out;
}

inline ScalarField evaluate_template(const GeometryPtr& gp, const FieldTemplate& t) {
  switch (t.kind) {
    case TemplateKind::constant:
      if (!(t.value > 0)) throw DomainError("constant field must be positive");
      return ScalarField(gp, t.value);
    case TemplateKind::trig_poly: {
      auto s = trig_polynomial(gp, t);
      for (double& x : s.values()) x += t.offset;
      if (!(s.min() > 0)) throw DomainError("trig-poly field is not positive; raise offset");
      return s;
    }
    case TemplateKind::exp_trig:
      return trig_polynomial(gp, t).map([](double x) { return std::exp(x); });
    case TemplateKind::sin_sqrt_alpha: {
      const auto& g = *gp;
      if (t.profile_factor < 0 || t.profile_factor >= g.num_factors()) throw ConfigError("profile factor out of range");
      const auto& fg = g.factor(t.profile_factor);
      std::vector<double> prof(fg.num_nodes());
      for (long long k = 0; k < fg.num_nodes(); ++k) prof[k] = fg.profile(fg.point(k));
      ScalarField s(gp);
      const double ra = std::sqrt(t.alpha);
      for (long long p = 0; p < g.num_nodes(); ++p)
        s[p] = std::exp(t.coefficient * std::sin(ra * prof[g.local_index(p, t.profile_factor)]));
      return s;
    }
  }
  return ScalarField(gp, 1.0);
}

}  // namespace multiconf
