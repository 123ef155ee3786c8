// multiconf: verification suites for multiconformal metrics on products.
//
//   multiconf verify-curvature  --factors sphere:2,torus:2 --ladder 16,32,64
//   multiconf verify-identities --q "0,0;2,2;3,1"
//   multiconf classify          --factors bumpy_torus:3,torus:2
//   multiconf divergence        --alpha 8 --beta 1
//
// Exit codes: 0 pass, 1 verification failure, 2 config error,
// 3 precondition violation.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "multiconf/commands.hpp"

using namespace multiconf;

namespace {

struct Flags {
  std::string factors, fields, ladder, suite, q, tol_file, eps, out = "runs";
  std::optional<double> alpha, beta;
  std::uint64_t seed = 1;
  int order = 8;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--factors", f.factors, "factor list (sphere:2,torus:2) or a JSON file");
  sub->add_option("--fields", f.fields, "field templates per factor (exp-trig,constant) or a JSON file");
  sub->add_option("--ladder", f.ladder, "nodes per axis, strictly increasing (16,32,64)");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--order", f.order, "finite difference order (2, 4, 6, 8)");
  sub->add_option("--out", f.out, "run directory");
  sub->add_option("--tol-file", f.tol_file, "JSON object overriding default tolerances");
}

bool looks_like_file(const std::string& s) {
  return s.ends_with(".json") || (std::filesystem::exists(s) && std::filesystem::is_regular_file(s));
}

RunConfig make_config(const std::string& command, const Flags& f) {
  RunConfig c;
  c.command = command;
  c.seed = f.seed;
  c.order = f.order;
  c.out = f.out;
  if (!f.factors.empty()) {
    if (looks_like_file(f.factors)) {
      auto text = read_file(f.factors);
      c.inputs.emplace_back("factors", text);
      c.factors = factors_from_json(parse_json_text(text, f.factors));
    } else {
      c.factors = parse_factor_shorthand(f.factors);
    }
  }
  if (!f.fields.empty()) {
    if (looks_like_file(f.fields)) {
      auto text = read_file(f.fields);
      c.inputs.emplace_back("fields", text);
      c.fields = fields_from_json(parse_json_text(text, f.fields), f.seed);
    } else {
      c.fields = parse_field_shorthand(f.fields, f.seed);
    }
  }
  if (!f.ladder.empty()) c.ladder = parse_int_list(f.ladder);
  if (!f.suite.empty()) {
    std::stringstream ss(f.suite);
    std::string s;
    while (std::getline(ss, s, ',')) c.suites.push_back(s);
  }
  if (!f.q.empty()) c.q = parse_q_sweep(f.q);
  if (!f.eps.empty()) c.epsilons = parse_double_list(f.eps);
  c.alpha = f.alpha;
  c.beta = f.beta;
  if (!f.tol_file.empty()) {
    auto text = read_file(f.tol_file);
    c.inputs.emplace_back("tolerances", text);
    c.tol.update(parse_json_text(text, f.tol_file));
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiconformal metric verification"};
  app.require_subcommand(1);
  Flags f;

  auto* vc = app.add_subcommand("verify-curvature", "closed form scalar curvature against the brute force oracle");
  add_common(vc, f);
  vc->add_option("--suite", f.suite, "oracle,conformal,warped or all");

  auto* vi = app.add_subcommand("verify-identities", "integral identities, B matrices and the key inequality");
  add_common(vi, f);
  vi->add_option("--suite", f.suite, "lemma,bmatrix,bsuite,rho,key,inequality,permutation,variation or all");
  vi->add_option("--q", f.q, "q sweep, vectors separated by ';' (0,0;2,2;3,1)");

  auto* cl = app.add_subcommand("classify", "trichotomy of the multiconformal class");
  add_common(cl, f);

  auto* dv = app.add_subcommand("divergence", "normalized total scalar curvature under shrinking");
  add_common(dv, f);
  dv->add_option("--alpha", f.alpha, "sin(sqrt(alpha) phi) parameter; omitted means search");
  dv->add_option("--beta", f.beta, "exponent ratio of the second factor");
  dv->add_option("--eps", f.eps, "shrink factors (1,0.5,0.25,...)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  RunConfig cfg;
  try {
    cfg = make_config(sub->get_name(), f);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return run_command(cfg, std::cout, std::cerr);
}
