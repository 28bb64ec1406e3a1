#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "liftcurv/adapted_blocks.hpp"
#include "liftcurv/base_geometry.hpp"
#include "liftcurv/errors.hpp"
#include "liftcurv/families.hpp"
#include "liftcurv/lemma_checks.hpp"
#include "liftcurv/oracle_compare.hpp"
#include "liftcurv/sampler.hpp"
#include "liftcurv/weyl.hpp"

// Run configuration: a flat `key = value` file whose values are JSON literals
// (numbers, "strings", true/false, [arrays]), then LIFTCURV_SEED, then flags.

namespace liftcurv {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::string base = "flat";
  std::size_t dim = 3;
  FamilySpec family;
  SamplerSpec sampler;
  FlatnessTolerances flat_tol;
  OracleTolerances oracle_tol;
  FormulaVariant variant = FormulaVariant::Corrected;
  std::string mode = "standard";  // verify-theorem: standard | contrapositive
  std::string lemma = "all";      // lemma-rank: lemma1 | lemma1_remark | lemma2 | all
  std::size_t draws = 100;
  std::string fault_block;  // oracle-diff fixture: corrupt this analytic curvature block
  std::string output;
};

namespace detail {

inline double as_number(const std::string& key, const json& v) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "' expects a number");
  return v.get<double>();
}

inline std::size_t as_count(const std::string& key, const json& v) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError("config key '" + key + "' expects a non-negative integer");
  return v.get<std::size_t>();
}

inline std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) throw ConfigError("config key '" + key + "' expects a string");
  return v.get<std::string>();
}

inline Polynomial as_polynomial(const std::string& key, const json& v) {
  Polynomial p;
  if (v.is_number()) {
    p.coeffs = {v.get<double>()};
    return p;
  }
  if (!v.is_array() || v.empty()) throw ConfigError("config key '" + key + "' expects a coefficient list");
  for (const auto& e : v) p.coeffs.push_back(as_number(key, e));
  return p;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Bare words are accepted as strings so `base = flat` works without quotes.
inline json parse_value(const std::string& key, const std::string& text) {
  if (text.empty()) throw ConfigError("config key '" + key + "' has no value");
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) {
    if (text.find_first_of("[]{}\"") != std::string::npos)
      throw ConfigError("config key '" + key + "' has a malformed value: " + text);
    v = text;
  }
  return v;
}

}  // namespace detail

inline void set_key(RunConfig& c, const std::string& key, const json& v) {
  using namespace detail;
  static const std::array<std::string_view, 6> custom_keys = {"c1", "c2", "c3", "d1", "d2", "d3"};
  for (std::size_t i = 0; i < custom_keys.size(); ++i)
    if (key == custom_keys[i]) {
      c.family.custom[i] = as_polynomial(key, v);
      return;
    }
  if (key == "base") c.base = as_string(key, v);
  else if (key == "dim") c.dim = as_count(key, v);
  else if (key == "family") c.family.name = as_string(key, v);
  else if (key == "k") c.family.k = as_number(key, v);
  else if (key == "eps") c.family.eps = as_number(key, v);
  else if (key == "alpha") c.family.alpha = as_polynomial(key, v);
  else if (key == "beta") c.family.beta = as_polynomial(key, v);
  else if (key == "gamma") c.family.gamma = as_polynomial(key, v);
  else if (key == "samples") c.sampler.count = as_count(key, v);
  else if (key == "seed") c.sampler.seed = as_count(key, v);
  else if (key == "x_range") c.sampler.x_range = as_number(key, v);
  else if (key == "y_lo") c.sampler.y_lo = as_number(key, v);
  else if (key == "y_hi") c.sampler.y_hi = as_number(key, v);
  else if (key == "y_min") c.sampler.y_min = as_number(key, v);
  else if (key == "zero_fiber") {
    if (!v.is_boolean()) throw ConfigError("config key 'zero_fiber' expects true or false");
    c.sampler.zero_fiber = v.get<bool>();
  } else if (key == "flat_tol") c.flat_tol.flat = as_number(key, v);
  else if (key == "nonflat_tol") c.flat_tol.non_flat = as_number(key, v);
  else if (key == "oracle_rel") c.oracle_tol.rel = as_number(key, v);
  else if (key == "oracle_floor") c.oracle_tol.floor = as_number(key, v);
  else if (key == "fd_step") c.oracle_tol.fd.step = as_number(key, v);
  else if (key == "variant") {
    const std::string s = as_string(key, v);
    if (s == "corrected") c.variant = FormulaVariant::Corrected;
    else if (s == "printed") c.variant = FormulaVariant::Printed;
    else throw ConfigError("variant must be 'corrected' or 'printed'");
  } else if (key == "mode") c.mode = as_string(key, v);
  else if (key == "lemma") c.lemma = as_string(key, v);
  else if (key == "draws") c.draws = as_count(key, v);
  else if (key == "fault_block") c.fault_block = as_string(key, v);
  else if (key == "output") c.output = as_string(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

// "key = value" assignment as used by config files and --set.
inline void apply_assignment(RunConfig& c, std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key = value, got: " + std::string(line));
  const std::string key = detail::trim(line.substr(0, eq));
  if (key.empty()) throw ConfigError("missing key in: " + std::string(line));
  set_key(c, key, detail::parse_value(key, detail::trim(line.substr(eq + 1))));
}

inline void apply_config_text(RunConfig& c, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // comments start at a '#' outside quotes
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    if (detail::trim(line).empty()) continue;
    try {
      apply_assignment(c, line);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(c, ss.str());
}

// LIFTCURV_SEED overrides the config seed; explicit flags are applied afterwards.
inline void apply_environment(RunConfig& c) {
  const char* s = std::getenv("LIFTCURV_SEED");
  if (s == nullptr || *s == '\0') return;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0') throw ConfigError("LIFTCURV_SEED must be a non-negative integer");
  c.sampler.seed = v;
}

// Family constraints are checked on the energy densities the sampler can produce.
inline void sync_t_range(RunConfig& c) {
  const double lo = c.sampler.zero_fiber ? c.sampler.y_min : std::max(c.sampler.y_lo, c.sampler.y_min);
  const double hi = c.sampler.zero_fiber ? c.sampler.y_min : std::max(c.sampler.y_hi, c.sampler.y_min);
  // |y|_g in [lo, hi] gives t = |y|_g^2 / 2
  c.family.t_min = 0.5 * lo * lo;
  c.family.t_max = 0.5 * hi * hi;
}

inline void validate(const RunConfig& c, bool allow_dim_one = false) {
  if (c.dim > 5) throw ConfigError("dim must be at most 5");
  if (c.dim < (allow_dim_one ? 1u : 2u)) throw ConfigError("dim must be at least 2");
  if (!is_known_family(c.family.name)) throw ConfigError("unknown family '" + c.family.name + "'");
  validate(c.sampler);
  if (needs_nonzero_fiber(c.family.name) && c.sampler.y_min <= 0.0)
    throw ConfigError("family '" + c.family.name + "' lives on nonzero tangent vectors: set y_min > 0");
  if (!(c.flat_tol.flat > 0.0) || !(c.flat_tol.non_flat >= c.flat_tol.flat))
    throw ConfigError("tolerances must satisfy 0 < flat_tol <= nonflat_tol");
  if (!(c.oracle_tol.rel > 0.0) || !(c.oracle_tol.floor > 0.0) || !(c.oracle_tol.fd.step > 0.0))
    throw ConfigError("oracle tolerances and fd_step must be positive");
  if (c.mode != "standard" && c.mode != "contrapositive") throw ConfigError("mode must be 'standard' or 'contrapositive'");
  if (c.lemma != "all" && !lemma_from_name(c.lemma)) throw ConfigError("unknown lemma '" + c.lemma + "'");
  if (c.draws == 0) throw ConfigError("draws must be positive");
  if (!c.fault_block.empty() && !block_from_name(c.fault_block))
    throw ConfigError("unknown block '" + c.fault_block + "'");
  if (!allow_dim_one) BaseGeometry::parse(c.base, c.dim);
}

inline json to_json(const Polynomial& p) { return p.coeffs; }

inline json to_json(const RunConfig& c) {
  json j;
  j["base"] = c.base;
  j["dim"] = c.dim;
  json f;
  f["name"] = c.family.name;
  f["k"] = c.family.k.value_or(default_k(c.family.name));
  f["eps"] = c.family.eps;
  f["alpha"] = to_json(c.family.alpha);
  f["beta"] = to_json(c.family.beta);
  f["gamma"] = to_json(c.family.gamma);
  if (c.family.name == "custom") {
    static const std::array<const char*, 6> names = {"c1", "c2", "c3", "d1", "d2", "d3"};
    for (std::size_t i = 0; i < 6; ++i) f[names[i]] = to_json(c.family.custom[i]);
  }
  f["t_range"] = {c.family.t_min, c.family.t_max};
  j["family"] = f;
  j["sampler"] = {{"count", c.sampler.count},     {"seed", c.sampler.seed}, {"x_range", c.sampler.x_range},
                  {"y_lo", c.sampler.y_lo},        {"y_hi", c.sampler.y_hi}, {"y_min", c.sampler.y_min},
                  {"zero_fiber", c.sampler.zero_fiber}};
  j["tolerances"] = {{"flat", c.flat_tol.flat},
                     {"non_flat", c.flat_tol.non_flat},
                     {"oracle_rel", c.oracle_tol.rel},
                     {"oracle_floor", c.oracle_tol.floor},
                     {"fd_step", c.oracle_tol.fd.step}};
  j["variant"] = std::string(to_string(c.variant));
  j["mode"] = c.mode;
  return j;
}

}  // namespace liftcurv
