#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "liftcurv/commands.hpp"

namespace {

struct Overrides {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::size_t> dim, samples, draws;
  std::optional<std::uint64_t> seed;
  std::optional<double> y_min, k, eps;
  std::optional<std::string> base, family, variant, mode, lemma, output, fault_block;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config, "key = value config file");
  sub->add_option("--set", o.sets, "override as key=value (repeatable)");
  sub->add_option("--dim", o.dim, "base dimension n");
  sub->add_option("--base", o.base, "flat | flat-curvilinear | sphere:c | perturbed:eps");
  sub->add_option("--samples", o.samples, "number of sample points");
  sub->add_option("--seed", o.seed, "sampler seed");
  sub->add_option("--y-min", o.y_min, "minimum fiber length");
  sub->add_option("--variant", o.variant, "corrected | printed");
  sub->add_option("-o,--output", o.output, "write the JSON report here");
}

void add_family(CLI::App* sub, Overrides& o, bool with_name) {
  if (with_name) sub->add_option("--family", o.family, "family name");
  sub->add_option("--k", o.k, "base-curvature parameter k");
  sub->add_option("--eps", o.eps, "thm42 / cor43 constant");
}

liftcurv::RunConfig build_config(const Overrides& o) {
  using liftcurv::json;
  liftcurv::RunConfig c;
  if (!o.config.empty()) liftcurv::apply_config_file(c, o.config);
  liftcurv::apply_environment(c);
  for (const auto& s : o.sets) liftcurv::apply_assignment(c, s);
  auto set = [&](const char* key, const auto& v) {
    if (v) liftcurv::set_key(c, key, json(*v));
  };
  set("dim", o.dim);
  set("samples", o.samples);
  set("draws", o.draws);
  set("seed", o.seed);
  set("y_min", o.y_min);
  set("k", o.k);
  set("eps", o.eps);
  set("base", o.base);
  set("family", o.family);
  set("variant", o.variant);
  set("mode", o.mode);
  set("lemma", o.lemma);
  set("output", o.output);
  set("fault_block", o.fault_block);
  return c;
}

int emit(const liftcurv::CommandResult& r, const std::string& output) {
  std::cout << r.message << "\n";
  if (!output.empty()) {
    try {
      liftcurv::write_report(r.report, output);
    } catch (const liftcurv::ConfigError& e) {
      std::cerr << e.what() << "\n";
      return liftcurv::kExitConfig;
    }
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"liftcurv: Weyl curvature of lifted metrics on tangent bundles"};
  app.require_subcommand(1);
  Overrides o;
  std::string theorem, report_path;

  auto* verify = app.add_subcommand("verify-theorem", "assert the conformal-flatness verdict of a family");
  verify->add_option("name", theorem, "thm41_form1 | thm41_form2 | thm42 | cor43 | thm44 | remark | sasaki")
      ->required();
  add_common(verify, o);
  add_family(verify, o, false);
  verify->add_option("--mode", o.mode, "standard | contrapositive");

  auto* norm = app.add_subcommand("weyl-norm", "report Weyl sup norms without asserting");
  add_common(norm, o);
  add_family(norm, o, true);

  auto* oracle = app.add_subcommand("oracle-diff", "compare analytic outputs with finite differences");
  add_common(oracle, o);
  add_family(oracle, o, true);
  oracle->add_option("--fault-block", o.fault_block, "corrupt one analytic curvature block (test fixture)");

  auto* lemma = app.add_subcommand("lemma-rank", "rank checks of the monomial systems");
  add_common(lemma, o);
  lemma->add_option("--lemma", o.lemma, "lemma1 | lemma1_remark | lemma2 | all");
  lemma->add_option("--draws", o.draws, "random draws");

  auto* report = app.add_subcommand("report", "render a JSON report");
  report->add_option("path", report_path, "report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : liftcurv::kExitConfig;
  }

  if (report->parsed()) {
    const liftcurv::CommandResult r = liftcurv::cmd_report(report_path, std::cout);
    if (r.exit_code != liftcurv::kExitPass) std::cerr << r.message << "\n";
    return r.exit_code;
  }

  liftcurv::RunConfig cfg;
  try {
    cfg = build_config(o);
  } catch (const liftcurv::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return liftcurv::kExitConfig;
  }

  liftcurv::CommandResult r;
  if (verify->parsed()) r = liftcurv::cmd_verify_theorem(theorem, cfg);
  else if (norm->parsed()) r = liftcurv::cmd_weyl_norm(cfg);
  else if (oracle->parsed()) r = liftcurv::cmd_oracle_diff(cfg);
  else r = liftcurv::cmd_lemma_rank(cfg);
  return emit(r, cfg.output);
}
