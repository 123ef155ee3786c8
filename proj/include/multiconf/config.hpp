#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "factor_grid.hpp"
#include "report.hpp"
#include "templates.hpp"

namespace multiconf {

// ---------------------------------------------------------------------------
// factors

struct FactorSpec {
  std::string kind = "sphere";  // sphere | flat_torus | bumpy_torus | custom
  std::string name;             // custom built-in: conformal_torus | interval
  int dim = 2;
  double radius = 1.0;
  std::vector<double> lengths;  // empty: 2 pi per axis
  std::optional<int> nodes;     // empty: taken from the ladder
  double eps = 0.3;

  Json to_json() const {
    Json j;
    j["kind"] = kind;
    if (kind == "custom") j["name"] = name;
    j["dim"] = dim;
    if (kind == "sphere")
      j["radius"] = radius;
    else
      j["lengths"] = lengths;
    if (nodes) j["nodes"] = *nodes;
    if (kind == "bumpy_torus" || name == "conformal_torus") j["eps"] = eps;
    return j;
  }
};

inline std::string canonical_kind(const std::string& k) {
  if (k == "sphere" || k == "S") return "sphere";
  if (k == "torus" || k == "flat_torus" || k == "T") return "flat_torus";
  if (k == "bumpy_torus" || k == "bumpy") return "bumpy_torus";
  if (k == "custom") return "custom";
  if (k == "conformal_torus" || k == "interval") return "custom";
  throw ConfigError("unknown factor kind '" + k + "'");
}

inline FactorSpec factor_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("factor entry must be an object");
  FactorSpec s;
  try {
    s.kind = canonical_kind(j.at("kind").get<std::string>());
    if (s.kind == "custom") {
      s.name = j.contains("name") ? j["name"].get<std::string>() : j.at("kind").get<std::string>();
      if (s.name != "conformal_torus" && s.name != "interval") throw ConfigError("unknown custom factor '" + s.name + "'");
    }
    s.dim = j.value("dim", s.name == "interval" ? 1 : 2);
    s.radius = j.value("radius", 1.0);
    if (j.contains("lengths")) {
      if (j["lengths"].is_number())
        s.lengths = {j["lengths"].get<double>()};
      else
        s.lengths = j["lengths"].get<std::vector<double>>();
    }
    if (j.contains("nodes")) s.nodes = j["nodes"].get<int>();
    s.eps = j.value("eps", 0.3);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad factor entry: ") + e.what());
  }
  if (s.dim < 1) throw ConfigError("factor dimension must be positive");
  if (s.kind == "sphere" && !(s.radius > 0)) throw ConfigError("sphere radius must be positive");
  return s;
}

// "sphere:2,torus:2", "bumpy_torus:3", optional third field: radius for a
// sphere, lengths joined by '/' for tori ("torus:2:6.2832/3.1416")
inline std::vector<FactorSpec> parse_factor_shorthand(const std::string& text) {
  std::vector<FactorSpec> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw ConfigError("empty factor in '" + text + "'");
    std::vector<std::string> parts;
    std::stringstream is(item);
    std::string p;
    while (std::getline(is, p, ':')) parts.push_back(p);
    if (parts.empty() || parts.size() > 3) throw ConfigError("cannot parse factor '" + item + "'");
    Json j;
    j["kind"] = parts[0];
    try {
      if (parts.size() >= 2) j["dim"] = std::stoi(parts[1]);
      if (parts.size() == 3) {
        if (canonical_kind(parts[0]) == "sphere") {
          j["radius"] = std::stod(parts[2]);
        } else {
          std::vector<double> L;
          std::stringstream ls(parts[2]);
          std::string x;
          while (std::getline(ls, x, '/')) L.push_back(std::stod(x));
          j["lengths"] = L;
        }
      }
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse factor '" + item + "'");
    }
    out.push_back(factor_from_json(j));
  }
  if (out.empty()) throw ConfigError("no factors given");
  return out;
}

inline std::vector<FactorSpec> factors_from_json(const Json& j) {
  const Json& list = j.is_object() && j.contains("factors") ? j["factors"] : j;
  if (!list.is_array()) throw ConfigError("factor file must hold a list of factors");
  std::vector<FactorSpec> out;
  for (const auto& e : list) out.push_back(factor_from_json(e));
  if (out.empty()) throw ConfigError("no factors given");
  return out;
}

inline FactorGrid build_factor(const FactorSpec& s, int nodes) {
  const int n = s.nodes.value_or(nodes);
  FactorGrid f;
  if (s.kind == "sphere")
    f = make_sphere(s.dim, s.radius, n);
  else if (s.kind == "flat_torus")
    f = make_flat_torus(s.dim, s.lengths, n);
  else if (s.kind == "bumpy_torus")
    f = make_bumpy_torus(s.dim, s.lengths, n, s.eps);
  else if (s.name == "conformal_torus")
    f = make_conformal_torus(s.dim, s.lengths, n, s.eps);
  else if (s.name == "interval")
    f = make_interval(0.0, s.lengths.empty() ? 1.0 : s.lengths[0], n);
  else
    throw ConfigError("unknown factor kind '" + s.kind + "'");
  f.validate();
  return f;
}

// ---------------------------------------------------------------------------
// fields

struct FieldSpec {
  int factor = 0;
  FieldTemplate tmpl;

  Json to_json() const {
    Json p;
    switch (tmpl.kind) {
      case TemplateKind::constant: p["value"] = tmpl.value; break;
      case TemplateKind::sin_sqrt_alpha:
        p["alpha"] = tmpl.alpha;
        p["coefficient"] = tmpl.coefficient;
        p["profile_factor"] = tmpl.profile_factor;
        break;
      default:
        p["seed"] = tmpl.seed;
        p["terms"] = tmpl.terms;
        p["max_freq"] = tmpl.max_freq;
        p["amplitude"] = tmpl.amplitude;
        if (tmpl.kind == TemplateKind::trig_poly) p["offset"] = tmpl.offset;
        p["depends_on"] = tmpl.depends_on;
    }
    return Json{{"factor", factor}, {"expr", template_name(tmpl.kind)}, {"params", p}};
  }
};

inline FieldSpec field_from_json(const Json& j, std::uint64_t run_seed) {
  FieldSpec s;
  try {
    s.factor = j.at("factor").get<int>();
    s.tmpl.kind = template_kind(j.at("expr").get<std::string>());
    Json p = j.value("params", Json::object());
    s.tmpl.seed = p.contains("seed") ? p["seed"].get<std::uint64_t>() : mix_seed(run_seed, s.factor);
    s.tmpl.value = p.value("value", 1.0);
    s.tmpl.terms = p.value("terms", 4);
    s.tmpl.max_freq = p.value("max_freq", 3);
    s.tmpl.amplitude = p.value("amplitude", 0.3);
    s.tmpl.offset = p.value("offset", 1.0);
    s.tmpl.alpha = p.value("alpha", 1.0);
    s.tmpl.coefficient = p.value("coefficient", 1.0);
    s.tmpl.profile_factor = p.value("profile_factor", 0);
    if (p.contains("depends_on")) s.tmpl.depends_on = p["depends_on"].get<std::vector<int>>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad field entry: ") + e.what());
  }
  if (s.tmpl.terms < 1 || s.tmpl.max_freq < 1) throw ConfigError("field terms and max_freq must be >= 1");
  if (s.tmpl.kind == TemplateKind::sin_sqrt_alpha && !(s.tmpl.alpha > 0)) throw ConfigError("alpha must be positive");
  return s;
}

inline std::vector<FieldSpec> fields_from_json(const Json& j, std::uint64_t run_seed) {
  const Json& list = j.is_object() && j.contains("fields") ? j["fields"] : j;
  if (!list.is_array()) throw ConfigError("field file must hold a list of fields");
  std::vector<FieldSpec> out;
  for (const auto& e : list) out.push_back(field_from_json(e, run_seed));
  return out;
}

// "exp-trig,constant": one template name per factor, default parameters
inline std::vector<FieldSpec> parse_field_shorthand(const std::string& text, std::uint64_t run_seed) {
  std::vector<FieldSpec> out;
  std::stringstream ss(text);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    out.push_back(field_from_json(Json{{"factor", i}, {"expr", item}}, run_seed));
    ++i;
  }
  return out;
}

inline std::vector<FieldSpec> default_fields(int l, TemplateKind kind, std::uint64_t run_seed) {
  std::vector<FieldSpec> out;
  for (int i = 0; i < l; ++i) out.push_back(field_from_json(Json{{"factor", i}, {"expr", template_name(kind)}}, run_seed));
  return out;
}

// ---------------------------------------------------------------------------
// tolerances, all defaults in one place

struct Tolerances {
  double min_order = 1.8;            // convergence order over a ladder
  double curvature_final = 1e-2;     // closed form vs brute force, finest rung
  double rounding = 1e-9;            // constant fields: relative to max |R|
  double identity_final = 1e-2;      // integral identities, finest rung, relative
  double change_of_vars = 1e-9;      // relative
  double key_inequality = 1e-8;      // |value| for constant F
  double quadratic_form = 1e-9;      // relative
  double trichotomy_zero = 1e-6;     // |lambda0| treated as zero
  double eigen = 1e-8;               // inverse iteration, relative step
  double slope = 0.05;               // relative to the expected exponent
  double shrink_difference = 1e-2;   // |direct - decomposed| eps^{-exponent}
  double first_variation = 0.02;     // relative
  double einstein = 1e-3;            // |dE/dt| / scale at a critical metric
  double constancy = 1e-6;           // relative variance

  Json to_json() const {
    return Json{{"min_order", min_order},
                {"curvature_final", curvature_final},
                {"rounding", rounding},
                {"identity_final", identity_final},
                {"change_of_vars", change_of_vars},
                {"key_inequality", key_inequality},
                {"quadratic_form", quadratic_form},
                {"trichotomy_zero", trichotomy_zero},
                {"eigen", eigen},
                {"slope", slope},
                {"shrink_difference", shrink_difference},
                {"first_variation", first_variation},
                {"einstein", einstein},
                {"constancy", constancy}};
  }

  void update(const Json& j) {
    if (!j.is_object()) throw ConfigError("tolerance file must hold an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!it.value().is_number()) throw ConfigError("tolerance '" + it.key() + "' is not a number");
      const double v = it.value().get<double>();
      if (!(v > 0)) throw ConfigError("tolerance '" + it.key() + "' must be positive");
      const std::string& k = it.key();
      if (k == "min_order") min_order = v;
      else if (k == "curvature_final") curvature_final = v;
      else if (k == "rounding") rounding = v;
      else if (k == "identity_final") identity_final = v;
      else if (k == "change_of_vars") change_of_vars = v;
      else if (k == "key_inequality") key_inequality = v;
      else if (k == "quadratic_form") quadratic_form = v;
      else if (k == "trichotomy_zero") trichotomy_zero = v;
      else if (k == "eigen") eigen = v;
      else if (k == "slope") slope = v;
      else if (k == "shrink_difference") shrink_difference = v;
      else if (k == "first_variation") first_variation = v;
      else if (k == "einstein") einstein = v;
      else if (k == "constancy") constancy = v;
      else throw ConfigError("unknown tolerance '" + k + "'");
    }
  }
};

// ---------------------------------------------------------------------------

struct RunConfig {
  std::string command;
  std::vector<FactorSpec> factors;
  std::vector<FieldSpec> fields;  // empty: command default
  std::vector<std::string> suites;
  std::vector<int> ladder;
  std::vector<std::vector<double>> q;
  std::optional<double> alpha, beta;
  std::vector<double> epsilons;
  std::uint64_t seed = 1;
  int order = 8;
  std::filesystem::path out = "runs";
  Tolerances tol;
  // raw file contents that fed the config, hashed into the manifest
  std::vector<std::pair<std::string, std::string>> inputs;

  bool has_suite(const std::string& s) const {
    if (suites.empty()) return false;
    return std::find(suites.begin(), suites.end(), s) != suites.end() || std::find(suites.begin(), suites.end(), "all") != suites.end();
  }

  void validate() const {
    if (ladder.empty()) throw ConfigError("empty refinement ladder");
    for (size_t k = 0; k < ladder.size(); ++k) {
      if (ladder[k] < 8) throw ConfigError("ladder rungs must be >= 8 nodes per axis");
      if (k && ladder[k] <= ladder[k - 1]) throw ConfigError("refinement ladder must be strictly increasing");
    }
    if (order != 2 && order != 4 && order != 6 && order != 8) throw ConfigError("stencil order must be 2, 4, 6 or 8");
    for (const auto& f : fields)
      if (f.factor < 0 || f.factor >= static_cast<int>(factors.size()))
        throw ConfigError("field refers to factor " + std::to_string(f.factor) + " but there are " + std::to_string(factors.size()));
    for (const auto& qq : q)
      if (qq.size() != factors.size()) throw ConfigError("each q needs one entry per factor");
    for (double e : epsilons)
      if (!(e > 0)) throw ConfigError("epsilons must be positive");
  }

  Json to_json() const {
    Json j;
    j["command"] = command;
    j["factors"] = Json::array();
    for (const auto& f : factors) j["factors"].push_back(f.to_json());
    j["fields"] = Json::array();
    for (const auto& f : fields) j["fields"].push_back(f.to_json());
    j["suites"] = suites;
    j["ladder"] = ladder;
    j["q"] = q;
    j["alpha"] = alpha ? Json(*alpha) : Json(nullptr);
    j["beta"] = beta ? Json(*beta) : Json(nullptr);
    j["epsilons"] = epsilons;
    j["seed"] = seed;
    j["order"] = order;
    j["tolerances"] = tol.to_json();
    return j;
  }
};

inline Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError("cannot parse " + what + ": " + e.what());
  }
}

// Integer list "16,32,64"
inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string x;
  while (std::getline(ss, x, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(x, &used));
      if (used != x.size()) throw std::invalid_argument(x);
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse integer list '" + text + "'");
    }
  }
  return out;
}

inline std::vector<double> parse_double_list(const std::string& text, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string x;
  while (std::getline(ss, x, sep)) {
    try {
      size_t used = 0;
      out.push_back(std::stod(x, &used));
      if (used != x.size()) throw std::invalid_argument(x);
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse number list '" + text + "'");
    }
  }
  return out;
}

// q sweep "0,0;2,2;3,1"
inline std::vector<std::vector<double>> parse_q_sweep(const std::string& text) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(parse_double_list(item));
  return out;
}

}  // namespace multiconf
