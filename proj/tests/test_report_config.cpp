#include <filesystem>
#include <sstream>

#include "common.hpp"

using namespace mct;

TEST(Report, DoublesRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(std::numbers::pi)), std::numbers::pi);
}

TEST(Report, CsvTable) {
  CsvTable t({"h", "err"});
  t.add({0.5, 0.25});
  EXPECT_EQ(t.str(), "h,err\n0.5,0.25\n");
  EXPECT_THROW(t.add({1.0}), StructuralError);
}

TEST(Report, GitBlobHashes) {
  EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(sha1_hex("abc"), "a9993e364706816aba3e25717850c26c9cd0d89d");
}

TEST(Report, ManifestListsEverything) {
  auto dir = std::filesystem::temp_directory_path() / "multiconf_manifest_test";
  std::filesystem::remove_all(dir);
  RunDirectory out(dir);
  out.add_input("factors.json", "[]");
  out.write("a.txt", "hello\n");
  Json cfg{{"command", "classify"}};
  out.write_manifest(cfg, 0);
  auto m = Json::parse(read_file(dir / "manifest.json"));
  EXPECT_EQ(m["outputs"]["a.txt"], "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(m["inputs"]["factors.json"], git_blob_hash("[]"));
  EXPECT_EQ(m["config_hash"], git_blob_hash(cfg.dump()));
  EXPECT_EQ(m["exit_code"], 0);
  EXPECT_EQ(m["config"]["command"], "classify");
  std::filesystem::remove_all(dir);
  EXPECT_THROW(read_file(dir / "missing"), ConfigError);
}

TEST(Config, FactorShorthand) {
  auto f = parse_factor_shorthand("sphere:2:1.5,torus:2:6/3,bumpy_torus:3");
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].kind, "sphere");
  EXPECT_EQ(f[0].radius, 1.5);
  EXPECT_EQ(f[1].kind, "flat_torus");
  EXPECT_EQ(f[1].lengths, (std::vector<double>{6.0, 3.0}));
  EXPECT_EQ(f[2].kind, "bumpy_torus");
  EXPECT_EQ(f[2].dim, 3);
  EXPECT_THROW(parse_factor_shorthand("cube:2"), ConfigError);
  EXPECT_THROW(parse_factor_shorthand("sphere:x"), ConfigError);
  EXPECT_THROW(parse_factor_shorthand("sphere:2,,torus:2"), ConfigError);
  EXPECT_THROW(parse_factor_shorthand("sphere:2:-1"), ConfigError);
}

TEST(Config, FactorJson) {
  auto f = factors_from_json(Json::parse(R"([{"kind":"sphere","dim":3,"radius":2,"nodes":12},
                                             {"kind":"custom","name":"conformal_torus","dim":2,"eps":0.2}])"));
  EXPECT_EQ(*f[0].nodes, 12);
  EXPECT_EQ(build_factor(f[0], 40).axes[0].nodes, 12);
  EXPECT_EQ(f[1].name, "conformal_torus");
  EXPECT_EQ(build_factor(f[1], 10).kind, "conformal_torus");
  EXPECT_THROW(factors_from_json(Json::parse(R"([{"kind":"custom","name":"klein"}])")), ConfigError);
  EXPECT_THROW(factors_from_json(Json::parse(R"([{"dim":2}])")), ConfigError);
  EXPECT_THROW(factors_from_json(Json::parse(R"({"kind":"sphere"})")), ConfigError);
  EXPECT_THROW(parse_json_text("{", "factor file"), ConfigError);
}

TEST(Config, FieldJsonAndSeeds) {
  auto a = fields_from_json(Json::parse(R"([{"factor":0,"expr":"exp-trig"},{"factor":1,"expr":"constant","params":{"value":2}}])"), 7);
  auto b = fields_from_json(Json::parse(R"([{"factor":0,"expr":"exp-trig"}])"), 7);
  auto c = fields_from_json(Json::parse(R"([{"factor":0,"expr":"exp-trig"}])"), 8);
  EXPECT_EQ(a[0].tmpl.seed, b[0].tmpl.seed);
  EXPECT_NE(a[0].tmpl.seed, c[0].tmpl.seed);
  EXPECT_EQ(a[1].tmpl.value, 2.0);
  auto g = sphere_torus(10);
  EXPECT_EQ(evaluate_template(g, a[0].tmpl).values(), evaluate_template(g, b[0].tmpl).values());
  EXPECT_THROW(fields_from_json(Json::parse(R"([{"factor":0,"expr":"spline"}])"), 1), ConfigError);
  EXPECT_THROW(fields_from_json(Json::parse(R"([{"factor":0,"expr":"exp-trig","params":{"max_freq":0}}])"), 1), ConfigError);
}

TEST(Config, Tolerances) {
  Tolerances t;
  t.update(Json::parse(R"({"min_order":2.5,"slope":0.1})"));
  EXPECT_EQ(t.min_order, 2.5);
  EXPECT_EQ(t.slope, 0.1);
  EXPECT_THROW(t.update(Json::parse(R"({"min_order":-1})")), ConfigError);
  EXPECT_THROW(t.update(Json::parse(R"({"speed":1})")), ConfigError);
  EXPECT_THROW(t.update(Json::parse(R"({"slope":"big"})")), ConfigError);
}

TEST(Config, Validation) {
  RunConfig c;
  c.command = "verify-curvature";
  c.factors = parse_factor_shorthand("sphere:2,torus:2");
  c.ladder = {16, 32};
  EXPECT_NO_THROW(c.validate());
  c.ladder = {32, 16};
  EXPECT_THROW(c.validate(), ConfigError);
  c.ladder = {4};
  EXPECT_THROW(c.validate(), ConfigError);
  c.ladder = {16};
  c.order = 3;
  EXPECT_THROW(c.validate(), ConfigError);
  c.order = 8;
  c.q = {{1, 2, 3}};
  EXPECT_THROW(c.validate(), ConfigError);
  c.q.clear();
  c.fields = parse_field_shorthand("constant,constant,constant", 1);
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, Lists) {
  EXPECT_EQ(parse_int_list("16,32,64"), (std::vector<int>{16, 32, 64}));
  EXPECT_THROW(parse_int_list("16,x"), ConfigError);
  EXPECT_THROW(parse_int_list("16.5"), ConfigError);
  auto q = parse_q_sweep("0,0;2,2;3,1");
  ASSERT_EQ(q.size(), 3u);
  EXPECT_EQ(q[2], (std::vector<double>{3, 1}));
}

TEST(Ladder, Verdicts) {
  auto v = judge_ladder({0.4, 0.2, 0.1}, {1e-2, 2.5e-3, 6.25e-4}, 1e-2, 1.8, 0.0);
  EXPECT_TRUE(v.pass);
  EXPECT_NEAR(v.order, 2.0, 1e-12);
  EXPECT_FALSE(judge_ladder({0.4, 0.2, 0.1}, {1e-2, 5e-3, 2.5e-3}, 1e-2, 1.8, 0.0).pass);
  EXPECT_FALSE(judge_ladder({0.4, 0.2}, {1.0, 0.1}, 1e-2, 1.8, 0.0).pass);
  EXPECT_TRUE(judge_ladder({0.4, 0.2}, {1e-15, 2e-15}, 1e-2, 1.8, 1e-12).pass);
}

TEST(Commands, ExitCodes) {
  auto dir = std::filesystem::temp_directory_path() / "multiconf_cmd_test";
  std::filesystem::remove_all(dir);
  std::ostringstream log, err;
  RunConfig c;
  c.command = "classify";
  c.factors = parse_factor_shorthand("sphere:2,torus:2");
  c.ladder = {12};
  c.out = dir / "ok";
  EXPECT_EQ(run_command(c, log, err), kPass);
  auto t = Json::parse(read_file(dir / "ok" / "trichotomy.json"));
  EXPECT_EQ(t["case"], 1);
  EXPECT_TRUE(std::filesystem::exists(dir / "ok" / "manifest.json"));
  c.factors = parse_factor_shorthand("torus:1,torus:2");
  c.out = dir / "pre";
  EXPECT_EQ(run_command(c, log, err), kPreconditionError);
  c.command = "frobnicate";
  c.out = dir / "bad";
  EXPECT_EQ(run_command(c, log, err), kConfigError);
  std::filesystem::remove_all(dir);
}
