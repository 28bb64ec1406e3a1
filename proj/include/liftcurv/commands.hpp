#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "liftcurv/config.hpp"

// Subcommand implementations shared by the CLI and the tests. Each returns an
// exit code (0 pass, 1 violation, 2 configuration or degeneracy error) and a
// JSON report.

namespace liftcurv {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitConfig = 2;

struct CommandResult {
  int exit_code = kExitPass;
  json report;
  std::string message;
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline json report_header(const std::string& command, const RunConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["timestamp"] = utc_timestamp();
  j["formula_variant"] = std::string(to_string(cfg.variant));
  j["config"] = to_json(cfg);
  return j;
}

// Copy of a report with the timestamp removed, for byte-level comparisons.
inline json without_timestamp(json j) {
  j.erase("timestamp");
  return j;
}

inline json block_norms_json(const std::array<double, 12>& v) {
  json j = json::object();
  for (std::size_t b = 0; b < 12; ++b) j[std::string(kBlockNames[b])] = v[b];
  return j;
}

inline json point_json(const TangentPoint& p) { return {{"x", p.x}, {"y", p.y}}; }

inline json flatness_json(const FlatnessReport& r, std::size_t worst_points = 5) {
  json j;
  j["family"] = r.family;
  j["base"] = r.base;
  j["samples"] = r.points.size();
  j["verdict"] = std::string(to_string(r.verdict));
  j["sup_norm"] = r.sup;
  j["worst_block"] = r.worst_block ? json(std::string(kBlockNames[static_cast<std::size_t>(*r.worst_block)])) : json();
  j["block_norms"] = block_norms_json(r.block_norms);
  std::vector<std::size_t> idx(r.points.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return r.points[a].sup > r.points[b].sup; });
  json worst = json::array();
  for (std::size_t i = 0; i < std::min(worst_points, idx.size()); ++i) {
    const auto& p = r.points[idx[i]];
    json e = point_json(p.point);
    e["sup_norm"] = p.sup;
    e["block"] = std::string(kBlockNames[static_cast<std::size_t>(p.worst)]);
    worst.push_back(e);
  }
  j["worst_points"] = worst;
  return j;
}

inline json selfcheck_json(const FamilySelfcheck& s) {
  json j;
  j["pass"] = s.pass;
  j["degenerate_points"] = s.degenerate;
  if (s.singular_identity_applies) j["singular_identity_residual"] = s.singular_identity;
  if (s.d1_applies) {
    j["base_curvature"] = s.base_curvature;
    j["d1_residual"] = s.d1_residual;
  }
  return j;
}

namespace detail {

template <typename F>
CommandResult guarded(const std::string& command, const RunConfig& cfg, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    CommandResult r{kExitConfig, report_header(command, cfg), std::string("configuration error: ") + e.what()};
    r.report["error"] = r.message;
    return r;
  } catch (const DegenerateError& e) {
    CommandResult r{kExitConfig, report_header(command, cfg), std::string("degenerate metric: ") + e.what()};
    r.report["error"] = r.message;
    return r;
  } catch (const DomainError& e) {
    CommandResult r{kExitConfig, report_header(command, cfg), std::string("domain error: ") + e.what()};
    r.report["error"] = r.message;
    return r;
  }
}

// TM0 families get |y| >= 1e-3 unless y_min was set.
inline void default_fiber_floor(RunConfig& cfg) {
  if (needs_nonzero_fiber(cfg.family.name) && cfg.sampler.y_min == 0.0) cfg.sampler.y_min = 1e-3;
}

inline void finish(CommandResult& r, bool pass) {
  r.exit_code = pass ? kExitPass : kExitViolation;
  r.report["summary"] = {{"pass", pass}, {"exit_code", r.exit_code}, {"message", r.message}};
}

}  // namespace detail

// Builds the named family and checks the flat verdict on the configured base.
// Contrapositive mode moves to the perturbed base (when the configured base is
// not already non-constant) with y = 0 samples and expects a non-flat verdict.
inline CommandResult cmd_verify_theorem(const std::string& name, RunConfig cfg) {
  return detail::guarded("verify-theorem", cfg, [&]() {
    cfg.family.name = name;
    if (cfg.mode == "contrapositive") {
      if (cfg.base.rfind("perturbed", 0) != 0) cfg.base = "perturbed:0.1";
      cfg.sampler.zero_fiber = true;
    }
    detail::default_fiber_floor(cfg);
    sync_t_range(cfg);
    validate(cfg);
    const BaseGeometry base = BaseGeometry::parse(cfg.base, cfg.dim);
    const ParamFamily fam = build_family(cfg.family);
    const auto pts = sample_points(base, cfg.sampler);
    const FlatnessReport rep = conformal_flatness_report(fam, base, pts, cfg.flat_tol, cfg.variant);
    const FamilySelfcheck sc = family_selfcheck(fam, base, pts);
    const bool contra = cfg.mode == "contrapositive";
    CommandResult r{kExitPass, report_header("verify-theorem", cfg), ""};
    json run = flatness_json(rep);
    run["theorem"] = name;
    run["expected"] = contra ? "non-flat" : "flat";
    run["selfcheck"] = selfcheck_json(sc);
    const bool pass = contra ? rep.verdict == Verdict::NonFlat : rep.verdict == Verdict::Flat;
    run["pass"] = pass;
    r.report["runs"] = json::array({run});
    std::ostringstream msg;
    msg << name << " on " << base.label() << ": verdict " << to_string(rep.verdict) << ", sup norm " << rep.sup;
    if (rep.worst_block) msg << ", largest block " << kBlockNames[static_cast<std::size_t>(*rep.worst_block)];
    if (rep.verdict == Verdict::Inconclusive) msg << " (inconclusive: refine the sample set or tolerances)";
    r.message = msg.str();
    detail::finish(r, pass);
    return r;
  });
}

// Sup norms without an assertion.
inline CommandResult cmd_weyl_norm(RunConfig cfg) {
  return detail::guarded("weyl-norm", cfg, [&]() {
    detail::default_fiber_floor(cfg);
    sync_t_range(cfg);
    validate(cfg);
    const BaseGeometry base = BaseGeometry::parse(cfg.base, cfg.dim);
    const ParamFamily fam = build_family(cfg.family);
    const FlatnessReport rep = conformal_flatness_report(fam, base, cfg.sampler, cfg.flat_tol, cfg.variant);
    CommandResult r{kExitPass, report_header("weyl-norm", cfg), ""};
    json run = flatness_json(rep);
    run["pass"] = true;
    r.report["runs"] = json::array({run});
    std::ostringstream msg;
    msg << cfg.family.name << " on " << base.label() << ": sup norm " << rep.sup << " (" << to_string(rep.verdict)
        << ")";
    r.message = msg.str();
    detail::finish(r, true);
    return r;
  });
}

inline CommandResult cmd_oracle_diff(RunConfig cfg) {
  return detail::guarded("oracle-diff", cfg, [&]() {
    detail::default_fiber_floor(cfg);
    sync_t_range(cfg);
    validate(cfg);
    const BaseGeometry base = BaseGeometry::parse(cfg.base, cfg.dim);
    const ParamFamily fam = build_family(cfg.family);
    const auto pts = sample_points(base, cfg.sampler);
    const CoordMetric cm = coordinate_metric(fam, base);
    const auto fault = block_from_name(cfg.fault_block);

    CommandResult r{kExitPass, report_header("oracle-diff", cfg), ""};
    json points = json::array();
    std::map<std::string, double> worst;
    std::array<double, 12> worst_k{}, worst_c{};
    std::vector<std::string> flagged;
    std::size_t stencil_errors = 0;
    bool pass = true;
    for (const auto& p : pts) {
      json pj = point_json(p);
      try {
        AnalyticOutputs an = analytic_outputs(fam, base, p.x, p.y, cfg.variant);
        if (fault) an.curvature[*fault](0, 0, 0, cfg.dim > 1 ? 1 : 0) += 1.0;
        const PointDiff d = compare(an, fd_geometry(cm, join(p.x, p.y), cfg.oracle_tol.fd), cfg.oracle_tol);
        for (const auto& t : d.tensors) {
          pj[t.name] = t.rel;
          worst[t.name] = std::max(worst[t.name], t.rel);
        }
        for (std::size_t b = 0; b < 12; ++b) {
          worst_k[b] = std::max(worst_k[b], d.curvature_blocks[b]);
          worst_c[b] = std::max(worst_c[b], d.weyl_blocks[b]);
        }
        pj["flagged"] = d.flagged;
        for (const auto& f : d.flagged)
          if (std::find(flagged.begin(), flagged.end(), f) == flagged.end()) flagged.push_back(f);
        pj["pass"] = d.pass;
        pass = pass && d.pass;
      } catch (const DomainError& e) {
        ++stencil_errors;
        pj["error"] = e.what();
        pj["pass"] = false;
        pass = false;
      }
      points.push_back(pj);
    }
    json run;
    run["family"] = fam.name();
    run["base"] = base.label();
    run["samples"] = pts.size();
    json wj = json::object();
    for (const char* k : {"metric", "christoffel", "riemann", "ricci", "scalar", "weyl"}) wj[k] = worst[k];
    run["max_rel_diff"] = wj;
    run["curvature_block_rel_diff"] = block_norms_json(worst_k);
    run["weyl_block_rel_diff"] = block_norms_json(worst_c);
    run["flagged_blocks"] = flagged;
    run["stencil_errors"] = stencil_errors;
    if (!pts.empty()) {
      try {
        const ConvergenceEstimate ce = riemann_convergence(fam, base, pts.front());
        run["convergence"] = {{"err_h", ce.err_h},
                              {"err_half", ce.err_half},
                              {"order", std::isnan(ce.order) ? json() : json(ce.order)}};
      } catch (const DomainError&) {
        run["convergence"] = json();
      }
    }
    run["pass"] = pass;
    run["points"] = points;
    r.report["runs"] = json::array({run});
    std::ostringstream msg;
    msg << "oracle diff " << fam.name() << " on " << base.label() << ": max rel " << *std::max_element(
        wj.begin(), wj.end(), [](const json& a, const json& b) { return a.get<double>() < b.get<double>(); });
    if (!flagged.empty()) {
      msg << ", flagged";
      for (const auto& f : flagged) msg << ' ' << f;
    }
    if (stencil_errors) msg << ", " << stencil_errors << " stencil domain errors";
    r.message = msg.str();
    detail::finish(r, pass);
    return r;
  });
}

// Rank checks; lemma1 expects full rank for n >= 2 and rank 1 at n = 1, lemma2
// expects full rank for n >= 3 and is reported only at n = 2.
inline CommandResult cmd_lemma_rank(RunConfig cfg) {
  return detail::guarded("lemma-rank", cfg, [&]() {
    validate(cfg, true);
    std::vector<LemmaKind> kinds;
    if (cfg.lemma == "all") kinds = {LemmaKind::Lemma1, LemmaKind::Lemma1Remark, LemmaKind::Lemma2};
    else kinds = {*lemma_from_name(cfg.lemma)};
    CommandResult r{kExitPass, report_header("lemma-rank", cfg), ""};
    json runs = json::array();
    bool pass = true;
    std::ostringstream msg;
    for (LemmaKind k : kinds) {
      const RankSuite s = lemma_rank_suite(k, cfg.dim, cfg.draws, cfg.sampler.seed);
      json run;
      run["lemma"] = std::string(to_string(k));
      run["n"] = cfg.dim;
      run["draws"] = s.draws;
      run["columns"] = lemma_columns(k);
      run["full_rank_draws"] = s.full_rank;
      run["min_rank"] = s.min_rank;
      run["max_rank"] = s.max_rank;
      bool asserted = true;
      bool ok = true;
      if (k == LemmaKind::Lemma2) {
        asserted = cfg.dim >= 3;
        ok = s.full_rank == s.draws;
      } else if (cfg.dim == 1) {
        ok = s.max_rank == 1;  // the two monomials are collinear
      } else {
        ok = s.full_rank == s.draws;
      }
      run["asserted"] = asserted;
      run["pass"] = asserted ? ok : true;
      if (asserted) pass = pass && ok;
      runs.push_back(run);
      msg << to_string(k) << " n=" << cfg.dim << ": rank " << s.min_rank << ".." << s.max_rank << " of "
          << lemma_columns(k) << (asserted ? "" : " (reported)") << "; ";
    }
    r.report["runs"] = runs;
    r.message = msg.str();
    detail::finish(r, pass);
    return r;
  });
}

// ---- report rendering ----

inline CommandResult cmd_report(const std::string& path, std::ostream& out) {
  CommandResult r{kExitPass, json::object(), ""};
  std::ifstream in(path);
  if (!in) {
    r.exit_code = kExitConfig;
    r.message = "cannot read report '" + path + "'";
    return r;
  }
  json rep = json::parse(in, nullptr, false);
  if (rep.is_discarded() || !rep.is_object() || !rep.contains("schema_version")) {
    r.exit_code = kExitConfig;
    r.message = "report '" + path + "' is not a valid report";
    return r;
  }
  if (rep["schema_version"] != kSchemaVersion) {
    r.exit_code = kExitConfig;
    r.message = "unsupported schema_version " + rep["schema_version"].dump();
    return r;
  }
  r.report = rep;
  json runs = rep.value("runs", json::array());
  std::size_t samples = 0;
  for (const auto& run : runs) samples += run.value("samples", run.value("draws", std::size_t{0}));
  if (runs.empty() || samples == 0) {
    out << "no samples in report\n";
    r.exit_code = kExitConfig;
    r.message = "no samples";
    return r;
  }
  // failing runs first, then by decreasing sup norm
  std::vector<json> sorted(runs.begin(), runs.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const json& a, const json& b) {
    const bool pa = a.value("pass", true), pb = b.value("pass", true);
    if (pa != pb) return !pa;
    return a.value("sup_norm", 0.0) > b.value("sup_norm", 0.0);
  });
  std::size_t failed = 0;
  for (const auto& run : sorted) failed += run.value("pass", true) ? 0 : 1;
  out << "command: " << rep.value("command", "?") << "  variant: " << rep.value("formula_variant", "?")
      << "  schema: " << rep["schema_version"] << "\n";
  out << "runs: " << sorted.size() << "  failed: " << failed << "\n";
  const json& worst = sorted.front();
  out << "worst: " << worst.value("family", worst.value("lemma", std::string("?"))) << " "
      << (worst.value("pass", true) ? "PASS" : "FAIL");
  if (worst.contains("sup_norm")) out << " sup=" << worst["sup_norm"].get<double>();
  out << "\n\n";
  out << std::left << std::setw(14) << "run" << std::setw(22) << "base" << std::setw(14) << "verdict"
      << std::setw(14) << "sup" << "status\n";
  for (const auto& run : sorted) {
    std::ostringstream sup;
    if (run.contains("sup_norm")) sup << std::setprecision(3) << std::scientific << run["sup_norm"].get<double>();
    std::string label = run.value("family", run.value("lemma", std::string("?")));
    std::string verdict = run.value("verdict", std::string("-"));
    if (run.contains("min_rank"))
      verdict = "rank " + std::to_string(run["min_rank"].get<std::size_t>()) + "/" +
                std::to_string(run["columns"].get<std::size_t>());
    out << std::left << std::setw(14) << label << std::setw(22) << run.value("base", std::string("-"))
        << std::setw(14) << verdict << std::setw(14) << sup.str() << (run.value("pass", true) ? "PASS" : "FAIL")
        << "\n";
    if (run.contains("block_norms")) {
      out << "    blocks:";
      for (const auto& [k, v] : run["block_norms"].items()) {
        std::ostringstream bv;
        bv << std::setprecision(2) << std::scientific << v.get<double>();
        out << ' ' << k << '=' << bv.str();
      }
      out << "\n";
    }
  }
  r.message = failed ? "report contains failing runs" : "all runs pass";
  return r;
}

inline void write_report(const json& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report to '" + path + "'");
  out << report.dump(2) << "\n";
}

}  // namespace liftcurv
