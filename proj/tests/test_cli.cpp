#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "liftcurv/commands.hpp"

using namespace liftcurv;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string out;
};

// Runs the CLI binary with stdout captured; stderr is discarded.
CliRun run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(LIFTCURV_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p) != nullptr) r.out += buf;
  const int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("liftcurv_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string sample(const std::string& name) { return std::string(LIFTCURV_SAMPLES_DIR) + "/" + name; }

RunConfig config(const std::string& text) {
  RunConfig c;
  apply_config_text(c, text);
  return c;
}

}  // namespace

// ---- command functions ----

TEST(Cli, VerifyAntidiagonalOnFlatBase) {
  const CommandResult r = cmd_verify_theorem("thm44", config("dim = 3\nsamples = 100\nseed = 7\n"));
  EXPECT_EQ(r.exit_code, kExitPass);
  const json& run = r.report["runs"][0];
  EXPECT_LE(run["sup_norm"].get<double>(), 1e-8);
  EXPECT_EQ(run["verdict"], "flat");
  EXPECT_EQ(run["samples"], 100);
}

TEST(Cli, VerifySingularFamilyOnNonzeroVectors) {
  const CommandResult r = cmd_verify_theorem("thm42", config("dim = 2\ny_min = 1e-3\n"));
  EXPECT_EQ(r.exit_code, kExitPass) << r.message;
}

TEST(Cli, VerifyOnPerturbedBaseFails) {
  const CommandResult r = cmd_verify_theorem("thm44", config("base = \"perturbed:0.1\"\n"));
  EXPECT_EQ(r.exit_code, kExitViolation);
  EXPECT_EQ(r.report["runs"][0]["verdict"], "non-flat");
  EXPECT_FALSE(r.report["runs"][0]["worst_block"].is_null());
}

TEST(Cli, ContrapositiveModePasses) {
  const CommandResult r = cmd_verify_theorem("thm41_form2", config("mode = contrapositive\nsamples = 20\n"));
  EXPECT_EQ(r.exit_code, kExitPass) << r.message;
  EXPECT_EQ(r.report["runs"][0]["expected"], "non-flat");
  EXPECT_EQ(r.report["config"]["sampler"]["zero_fiber"], true);
}

TEST(Cli, DegenerateFamilyIsConfigurationError) {
  const CommandResult r =
      cmd_verify_theorem("thm41_form2", config("k = 1\nalpha = [1.0]\nbeta = [0.5, 0.5]\n"));
  EXPECT_EQ(r.exit_code, kExitConfig);
  EXPECT_NE(r.message.find("k*alpha - beta^2"), std::string::npos);
}

TEST(Cli, InvalidConfigurations) {
  EXPECT_EQ(cmd_verify_theorem("thm99", RunConfig{}).exit_code, kExitConfig);
  EXPECT_EQ(cmd_verify_theorem("thm44", config("dim = 9\n")).exit_code, kExitConfig);
  EXPECT_EQ(cmd_verify_theorem("thm44", config("base = torus\n")).exit_code, kExitConfig);
  EXPECT_EQ(cmd_verify_theorem("thm44", config("mode = sideways\n")).exit_code, kExitConfig);
  EXPECT_EQ(cmd_verify_theorem("thm44", config("samples = 0\n")).exit_code, kExitConfig);
  EXPECT_EQ(cmd_weyl_norm(config("family = thm42\ny_min = -1\n")).exit_code, kExitConfig);
  EXPECT_THROW(config("bogus = 1\n"), ConfigError);
  EXPECT_THROW(config("dim = [1\n"), ConfigError);
  EXPECT_THROW(config("dim = \"three\"\n"), ConfigError);
  EXPECT_THROW(config("zero_fiber = 1\n"), ConfigError);
  EXPECT_THROW(config("just words\n"), ConfigError);
}

TEST(Cli, ConfigErrorsCarryLineNumbers) {
  try {
    config("dim = 3\n# comment\nbogus = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Cli, ConfigParsing) {
  const RunConfig c = config(
      "base = flat-curvilinear  # trailing comment\n"
      "dim = 2\nfamily = \"custom\"\nc1 = [1, 2]\nd3 = 0.5\nvariant = printed\nzero_fiber = true\n"
      "flat_tol = 1e-9\noutput = \"a#b.json\"\n");
  EXPECT_EQ(c.base, "flat-curvilinear");
  EXPECT_EQ(c.dim, 2u);
  EXPECT_EQ(c.family.custom[0].coeffs, (std::vector<double>{1, 2}));
  EXPECT_EQ(c.family.custom[5].coeffs, (std::vector<double>{0.5}));
  EXPECT_EQ(c.variant, FormulaVariant::Printed);
  EXPECT_TRUE(c.sampler.zero_fiber);
  EXPECT_EQ(c.flat_tol.flat, 1e-9);
  EXPECT_EQ(c.output, "a#b.json");
}

TEST(Cli, OracleDiffSasakiIsExact) {
  const CommandResult r = cmd_oracle_diff(config("family = sasaki\nsamples = 5\n"));
  EXPECT_EQ(r.exit_code, kExitPass);
  for (const auto& [k, v] : r.report["runs"][0]["max_rel_diff"].items()) EXPECT_EQ(v.get<double>(), 0.0) << k;
}

TEST(Cli, OracleDiffFamilyWithinTolerance) {
  const CommandResult r = cmd_oracle_diff(config("family = thm41_form2\ndim = 3\nsamples = 20\n"));
  EXPECT_EQ(r.exit_code, kExitPass) << r.message;
  for (const auto& [k, v] : r.report["runs"][0]["max_rel_diff"].items()) EXPECT_LE(v.get<double>(), 1e-4) << k;
  EXPECT_EQ(r.report["runs"][0]["stencil_errors"], 0);
}

TEST(Cli, OracleDiffFaultInjection) {
  const CommandResult r = cmd_oracle_diff(config("family = thm41_form2\nsamples = 3\nfault_block = YXXY\n"));
  EXPECT_EQ(r.exit_code, kExitViolation);
  EXPECT_EQ(r.report["runs"][0]["flagged_blocks"], json::array({"K:YXXY"}));
  EXPECT_NE(r.message.find("K:YXXY"), std::string::npos);
}

TEST(Cli, OracleDiffStencilErrorsPerPoint) {
  // the hyperbolic chart ends at |x| = 2, inside the reach of a coarse stencil
  const CommandResult r =
      cmd_oracle_diff(config("family = sasaki\nbase = \"sphere:-1\"\ndim = 2\nx_range = 1.2\nfd_step = 0.5\nsamples = 10\n"));
  EXPECT_EQ(r.exit_code, kExitViolation);
  EXPECT_GT(r.report["runs"][0]["stencil_errors"].get<int>(), 0);
}

TEST(Cli, LemmaRank) {
  CommandResult r = cmd_lemma_rank(config("dim = 3\n"));
  EXPECT_EQ(r.exit_code, kExitPass);
  EXPECT_EQ(r.report["runs"].size(), 3u);
  r = cmd_lemma_rank(config("dim = 1\nlemma = lemma1\n"));
  EXPECT_EQ(r.exit_code, kExitPass);
  EXPECT_EQ(r.report["runs"][0]["max_rank"], 1);
  r = cmd_lemma_rank(config("dim = 2\nlemma = lemma2\n"));
  EXPECT_EQ(r.exit_code, kExitPass);
  EXPECT_EQ(r.report["runs"][0]["asserted"], false);
  EXPECT_EQ(r.report["runs"][0]["max_rank"], 8);
  EXPECT_EQ(cmd_lemma_rank(config("lemma = lemma7\n")).exit_code, kExitConfig);
}

TEST(Cli, ReportsAreDeterministic) {
  const RunConfig c = config("family = thm41_form2\nsamples = 10\nseed = 21\n");
  const std::string a = without_timestamp(cmd_weyl_norm(c).report).dump();
  const std::string b = without_timestamp(cmd_weyl_norm(c).report).dump();
  EXPECT_EQ(a, b);
  RunConfig d = c;
  d.sampler.seed = 22;
  EXPECT_NE(a, without_timestamp(cmd_weyl_norm(d).report).dump());
}

TEST(Cli, ReportFieldOrderIsStable) {
  const json r = cmd_verify_theorem("thm44", config("samples = 3\n")).report;
  std::vector<std::string> keys;
  for (const auto& [k, v] : r.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"schema_version", "command", "timestamp", "formula_variant", "config",
                                            "runs", "summary"}));
}

// ---- report rendering ----

TEST(Cli, RenderValidReport) {
  TempDir dir;
  write_report(cmd_verify_theorem("thm44", config("samples = 5\n")).report, dir.file("r.json"));
  std::ostringstream out;
  const CommandResult r = cmd_report(dir.file("r.json"), out);
  EXPECT_EQ(r.exit_code, kExitPass);
  EXPECT_NE(out.str().find("thm44"), std::string::npos);
  EXPECT_NE(out.str().find("blocks:"), std::string::npos);
  EXPECT_NE(out.str().find("PASS"), std::string::npos);
}

TEST(Cli, RenderEmptyReport) {
  TempDir dir;
  json rep = cmd_verify_theorem("thm44", config("samples = 5\n")).report;
  rep["runs"][0]["samples"] = 0;
  write_report(rep, dir.file("empty.json"));
  std::ostringstream out;
  EXPECT_EQ(cmd_report(dir.file("empty.json"), out).exit_code, kExitConfig);
  EXPECT_NE(out.str().find("no samples"), std::string::npos);
}

TEST(Cli, RenderMixedReportWorstFirst) {
  TempDir dir;
  json rep = cmd_verify_theorem("thm44", config("samples = 5\n")).report;
  const json fail = cmd_verify_theorem("thm44", config("samples = 5\nbase = \"perturbed:0.1\"\n")).report["runs"][0];
  const json pass2 = cmd_verify_theorem("thm41_form1", config("samples = 5\n")).report["runs"][0];
  rep["runs"].push_back(pass2);
  rep["runs"].push_back(fail);
  write_report(rep, dir.file("mixed.json"));
  std::ostringstream out;
  cmd_report(dir.file("mixed.json"), out);
  const std::string s = out.str();
  EXPECT_NE(s.find("failed: 1"), std::string::npos);
  EXPECT_NE(s.find("worst: thm44 FAIL"), std::string::npos);
  const auto first_fail = s.find("FAIL\n", s.find("status"));
  const auto first_pass = s.find("PASS\n", s.find("status"));
  EXPECT_LT(first_fail, first_pass);
}

TEST(Cli, RenderMissingOrCorruptReport) {
  TempDir dir;
  std::ostringstream out;
  EXPECT_EQ(cmd_report(dir.file("missing.json"), out).exit_code, kExitConfig);
  write_text(dir.file("bad.json"), "{not json");
  EXPECT_EQ(cmd_report(dir.file("bad.json"), out).exit_code, kExitConfig);
  write_text(dir.file("other.json"), "{\"schema_version\": 99}");
  EXPECT_EQ(cmd_report(dir.file("other.json"), out).exit_code, kExitConfig);
}

// ---- binary ----

TEST(CliBinary, ExitCodes) {
  EXPECT_EQ(run_cli("verify-theorem thm44 --dim 3 --samples 100 --seed 7").exit_code, 0);
  EXPECT_EQ(run_cli("verify-theorem thm42 --dim 2 --y-min 1e-3").exit_code, 0);
  EXPECT_EQ(run_cli("verify-theorem thm44 --base perturbed:0.1").exit_code, 1);
  EXPECT_EQ(run_cli("verify-theorem thm44 --dim 0").exit_code, 2);
  EXPECT_EQ(run_cli("verify-theorem thm44 --no-such-flag").exit_code, 2);
  EXPECT_EQ(run_cli("verify-theorem thm44 --set bogus=1").exit_code, 2);
  EXPECT_EQ(run_cli("").exit_code, 2);
  EXPECT_EQ(run_cli("oracle-diff --family sasaki --samples 5").exit_code, 0);
  const CliRun fault = run_cli("oracle-diff --family thm41_form2 --samples 3 --fault-block XXYY");
  EXPECT_EQ(fault.exit_code, 1);
  EXPECT_NE(fault.out.find("K:XXYY"), std::string::npos);
  EXPECT_EQ(run_cli("lemma-rank --dim 3").exit_code, 0);
  EXPECT_EQ(run_cli("report /nonexistent/report.json").exit_code, 2);
}

TEST(CliBinary, SampleConfigs) {
  EXPECT_EQ(run_cli("verify-theorem thm44 --config " + sample("thm44_flat.cfg")).exit_code, 0);
  EXPECT_EQ(run_cli("verify-theorem thm42 --config " + sample("thm42_tm0.cfg")).exit_code, 0);
  EXPECT_EQ(run_cli("verify-theorem thm41_form1 --config " + sample("contrapositive.cfg")).exit_code, 0);
  EXPECT_EQ(run_cli("oracle-diff --config " + sample("oracle_thm41_form2.cfg")).exit_code, 0);
  EXPECT_EQ(run_cli("oracle-diff --config " + sample("oracle_perturbed.cfg")).exit_code, 0);
  EXPECT_EQ(run_cli("lemma-rank --config " + sample("lemmas.cfg")).exit_code, 0);
}

TEST(CliBinary, SeedPrecedence) {
  TempDir dir;
  write_text(dir.file("c.cfg"), "seed = 1\nsamples = 3\n");
  const std::string base = "weyl-norm --family thm41_form2 --config " + dir.file("c.cfg") + " -o ";
  run_cli(base + dir.file("a.json"));
  EXPECT_EQ(read_json(dir.file("a.json"))["config"]["sampler"]["seed"], 1);
  run_cli(base + dir.file("b.json"), "LIFTCURV_SEED=5");
  EXPECT_EQ(read_json(dir.file("b.json"))["config"]["sampler"]["seed"], 5);
  run_cli(base + dir.file("c.json") + " --seed 9", "LIFTCURV_SEED=5");
  EXPECT_EQ(read_json(dir.file("c.json"))["config"]["sampler"]["seed"], 9);
  EXPECT_EQ(run_cli(base + dir.file("d.json"), "LIFTCURV_SEED=abc").exit_code, 2);
}

TEST(CliBinary, SameSeedSameReport) {
  TempDir dir;
  const std::string args = "verify-theorem thm41_form2 --samples 20 --seed 4 -o ";
  ASSERT_EQ(run_cli(args + dir.file("a.json")).exit_code, 0);
  ASSERT_EQ(run_cli(args + dir.file("b.json")).exit_code, 0);
  EXPECT_EQ(without_timestamp(read_json(dir.file("a.json"))).dump(2),
            without_timestamp(read_json(dir.file("b.json"))).dump(2));
  const CliRun rendered = run_cli("report " + dir.file("a.json"));
  EXPECT_EQ(rendered.exit_code, 0);
  EXPECT_NE(rendered.out.find("thm41_form2"), std::string::npos);
}
