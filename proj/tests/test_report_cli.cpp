#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "weylforge/suite.hpp"

using namespace weylforge;
using nlohmann::json;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(WEYLFORGE_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

RunConfig small_config() {
  RunConfig c;
  c.manifolds = {"schwarzschild", "generic-polynomial"};
  c.identities = {"bianchi1.weyl", "commutation2.riemann", "bochner2.teo-sbf"};
  c.points = 3;
  c.seed = 7;
  c.deterministic = true;
  return c;
}

}  // namespace

TEST(Rng, XoshiroReferenceOutputs) {
  auto r = Xoshiro256::from_state({1, 2, 3, 4});
  EXPECT_EQ(r.next(), 11520ULL);
  EXPECT_EQ(r.next(), 0ULL);
  EXPECT_EQ(r.next(), 1509978240ULL);
  EXPECT_EQ(r.next(), 1215971899390074240ULL);
}

TEST(Rng, SplitmixAndFnvReferenceOutputs) {
  std::uint64_t s = 0;
  EXPECT_EQ(Xoshiro256::splitmix64(s), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Rng, SamplePointsAreReproducibleAndInsideTheBox) {
  const auto chart = schwarzschild();
  for (int i = 0; i < 50; ++i) {
    const Point p = sample_point(chart, 42, i);
    EXPECT_EQ(p, sample_point(chart, 42, i));
    EXPECT_TRUE(chart.sample_box.contains(p));
  }
  EXPECT_NE(sample_point(chart, 42, 0), sample_point(chart, 43, 0));
  EXPECT_NE(sample_point(chart, 42, 0), sample_point(chart, 42, 1));
  EXPECT_NE(sample_point(chart, 42, 0), sample_point(schwarzschild_de_sitter(), 42, 0));
}

TEST(Suite, ResultsAreOrderedAndComplete) {
  const Report rep = run_suite(small_config());
  EXPECT_EQ(rep.results.size(), 3u * 2u * 3u);
  for (std::size_t i = 1; i < rep.results.size(); ++i) {
    const auto& a = rep.results[i - 1];
    const auto& b = rep.results[i];
    EXPECT_TRUE(std::tie(a.identity_id, a.manifold, a.point_index) < std::tie(b.identity_id, b.manifold, b.point_index));
  }
  EXPECT_EQ(rep.exit_code, 0);
  const auto* sbf = rep.find_summary("bochner2.teo-sbf");
  ASSERT_NE(sbf, nullptr);
  EXPECT_EQ(sbf->pass, 3);
  EXPECT_EQ(sbf->not_applicable, 3);
}

TEST(Suite, ThreadCountDoesNotChangeTheReport) {
  RunConfig a = small_config(), b = small_config();
  a.threads = 1;
  b.threads = 3;
  EXPECT_EQ(to_json(run_suite(a)), to_json(run_suite(b)));
}

TEST(Suite, NegativeControlExpectationGivesExitZero) {
  RunConfig c;
  c.manifolds = {"perturbed-schwarzschild"};
  c.identities = {"bochner2.teo-sbf"};
  c.points = 20;
  c.seed = 42;
  const Report rep = run_suite(c);
  EXPECT_EQ(rep.exit_code, 0);
  const auto* s = rep.find_summary("bochner2.teo-sbf");
  ASSERT_NE(s, nullptr);
  EXPECT_GE(s->expected_fail, 12);
  EXPECT_TRUE(s->negative_expectation_met);
  for (const auto& r : rep.results) EXPECT_EQ(to_string(r.status), std::string("expected-fail"));
}

TEST(Suite, TightToleranceProducesFailure) {
  RunConfig c = small_config();
  c.identities = {"commutation2.riemann"};
  c.manifolds = {"generic-polynomial"};
  c.tolerance_overrides["commutation2.riemann"] = 1e-30;
  const Report rep = run_suite(c);
  EXPECT_EQ(rep.exit_code, 1);
}

TEST(Suite, ConfigurationErrors) {
  RunConfig c = small_config();
  c.manifolds = {"s5"};
  EXPECT_THROW(run_suite(c), ConfigError);
  c = small_config();
  c.identities = {"nope"};
  try {
    run_suite(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bochner2.teo-sbf"), std::string::npos);
  }
  c = small_config();
  c.jet_order = 4;  // teo-sbf needs 5
  EXPECT_THROW(run_suite(c), ConfigError);
  c = small_config();
  c.points = 0;
  EXPECT_THROW(run_suite(c), ConfigError);
  c = small_config();
  c.identities = {"integral.prop1"};
  EXPECT_THROW(run_suite(c), ConfigError);
  c = small_config();
  c.tolerance_overrides["bianchi1.weyl"] = -1;
  EXPECT_THROW(run_suite(c), ConfigError);
}

TEST(Report, JsonSchema) {
  const Report rep = run_suite(small_config());
  const json j = json::parse(to_json(rep));
  ASSERT_TRUE(j.is_object());
  const std::string text = to_json(rep);
  EXPECT_LT(text.find("\"config\""), text.find("\"environment\""));
  EXPECT_LT(text.find("\"environment\""), text.find("\"results\""));
  EXPECT_LT(text.find("\"results\""), text.find("\"summary\""));
  for (const char* k : {"config", "environment", "results", "summary"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_FALSE(j["environment"].contains("timestamp"));
  for (const auto& r : j["results"]) {
    for (const char* k : {"identity_id", "manifold", "point", "residual_abs", "scale", "residual_rel", "status", "jet_order"})
      EXPECT_TRUE(r.contains(k)) << k;
    EXPECT_TRUE(r["residual_rel"].is_number());
  }
  EXPECT_EQ(j["summary"]["exit_code"], 0);

  RunConfig c = small_config();
  c.deterministic = false;
  EXPECT_TRUE(json::parse(to_json(run_suite(c)))["environment"].contains("timestamp"));
}

TEST(Report, CsvColumns) {
  const Report rep = run_suite(small_config());
  std::istringstream in(to_csv(rep));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "identity_id,manifold,x1,x2,x3,x4,residual_abs,scale,residual_rel,status,jet_order");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 10);
    ++rows;
  }
  EXPECT_EQ(rows, static_cast<int>(rep.results.size()));
}

TEST(Listing, IdentitiesAndManifolds) {
  const std::string ids = identity_listing();
  EXPECT_NE(ids.find("bochner2.teo-sbf  [Einstein,4D]  jets:5"), std::string::npos);
  EXPECT_NE(ids.find("integral.prop1  out-of-scope(global)"), std::string::npos);
  const std::string m = manifold_listing();
  EXPECT_NE(m.find("schwarzschild-de-sitter  Einstein(λ=Λ) ∇W≠0"), std::string::npos);
  EXPECT_NE(m.find("schwarzschild  Einstein(λ=0) ∇W≠0 Ricci-flat"), std::string::npos);
  EXPECT_NE(m.find("perturbed-schwarzschild  ∇W≠0 negative-control"), std::string::npos);
}

TEST(Cli, ListCommands) {
  const CliRun ids = cli("list identities");
  EXPECT_EQ(ids.code, 0);
  EXPECT_NE(ids.out.find("bochner2.teo-sbf  [Einstein,4D]  jets:5"), std::string::npos);
  const CliRun m = cli("list manifolds");
  EXPECT_EQ(m.code, 0);
  EXPECT_NE(m.out.find("schwarzschild-de-sitter  Einstein(λ=Λ) ∇W≠0"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  const CliRun bad = cli("verify --manifolds s5");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.out.find("generic-polynomial"), std::string::npos);
  EXPECT_EQ(cli("verify --identities nope").code, 2);
  EXPECT_EQ(cli("verify --tol bianchi1.weyl").code, 2);
  EXPECT_EQ(cli("verify --jet-order 9").code, 2);
  EXPECT_EQ(cli("verify --format xml").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("verify --manifolds perturbed-schwarzschild --identities bochner2.teo-sbf --points 20").code, 0);
  EXPECT_EQ(cli("verify --manifolds generic-polynomial --identities commutation2.riemann --points 2 "
                "--tol commutation2.riemann=1e-30 --format text")
                .code,
            1);
}

TEST(Cli, DeterministicReportsAreByteIdentical) {
  const std::string base = "verify --manifolds schwarzschild,cp2-fubini-study --identities bianchi1.weyl,key2.full "
                           "--points 4 --seed 9 --deterministic --out ";
  const std::string a = testing::TempDir() + "wf_a.json", b = testing::TempDir() + "wf_b.json";
  ASSERT_EQ(cli(base + a).code, 0);
  setenv("WEYL_FORGE_THREADS", "1", 1);
  ASSERT_EQ(cli(base + b).code, 0);
  unsetenv("WEYL_FORGE_THREADS");
  const std::string ja = slurp(a), jb = slurp(b);
  EXPECT_FALSE(ja.empty());
  EXPECT_EQ(ja, jb);
  const CliRun csv = cli("verify --manifolds schwarzschild --identities bianchi1.weyl --points 2 --format csv");
  EXPECT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.rfind("identity_id,manifold,x1", 0), 0u);
}
