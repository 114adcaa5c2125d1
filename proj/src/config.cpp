#include "tunnelsplit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <vector>

#include "tunnelsplit/error.hpp"

namespace tunnelsplit {

using nlohmann::json;

namespace {

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string join(const std::string& prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<std::string_view> known) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) != known.end()) continue;
    std::string msg = "unknown key";
    std::string hint = suggest_key(key, known);
    if (hint.empty() && where.empty()) {
      // Top-level keys that belong one level down, e.g. "sigma" for packet.sigma_k.
      const std::string nested = suggest_key(key, {"k0", "sigma_k", "x0", "nodes", "V0", "xc"});
      if (!nested.empty()) hint = (nested == "V0" || nested == "xc" ? "potential." : "packet.") + nested;
    }
    if (!hint.empty()) msg += "; did you mean \"" + hint + "\"?";
    throw ConfigError(join(where, key), msg);
  }
}

double get_number(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(where, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(join(where, key), "must be finite");
  return x;
}

std::optional<double> get_optional(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return get_number(obj, where, key, 0.0);
}

std::size_t get_count(const json& obj, const std::string& where, const char* key,
                      std::size_t fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(join(where, key), "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::string get_string(const json& obj, const std::string& where, const char* key,
                       std::string fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  if (!obj.at(key).is_string()) throw ConfigError(join(where, key), "expected a string");
  return obj.at(key).get<std::string>();
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

PotentialConfig parse_potential(const json& j) {
  const std::string w = "potential";
  PotentialConfig pc;
  pc.type = get_string(j, w, "type", pc.type);
  if (pc.type == "rectangular") {
    reject_unknown(j, w, {"type", "V0", "d", "xc"});
    pc.V0 = get_number(j, w, "V0", pc.V0);
    pc.d = get_number(j, w, "d", pc.d);
    pc.xc = get_number(j, w, "xc", pc.xc);
    require(pc.d > 0.0, "potential.d", "barrier width must be positive");
  } else if (pc.type == "sampled") {
    reject_unknown(j, w, {"type", "profile", "params", "n"});
    pc.profile = get_string(j, w, "profile", pc.profile);
    require(pc.profile == "gaussian", "potential.profile", "only \"gaussian\" is supported");
    pc.n = get_count(j, w, "n", pc.n);
    require(pc.n >= 1, "potential.n", "needs at least one segment");
    const json params = j.value("params", json::object());
    const std::string pw = "potential.params";
    reject_unknown(params, pw, {"V0", "width", "xc", "x_left", "x_right"});
    pc.V0 = get_number(params, pw, "V0", pc.V0);
    pc.width = get_number(params, pw, "width", pc.width);
    pc.xc = get_number(params, pw, "xc", pc.xc);
    pc.x_left = get_number(params, pw, "x_left", pc.xc - 4.0 * pc.width);
    pc.x_right = get_number(params, pw, "x_right", pc.xc + 4.0 * pc.width);
    require(pc.width > 0.0, "potential.params.width", "must be positive");
    require(pc.x_left < pc.x_right, "potential.params.x_left", "must be below x_right");
  } else {
    throw ConfigError("potential.type", "expected \"rectangular\" or \"sampled\"");
  }
  return pc;
}

void parse_tolerances(const json& j, Tolerances& t) {
  const std::string w = "tolerances";
  reject_unknown(j, w,
                 {"decomposition", "midpoint", "oddness", "current", "unitarity", "phase_relation",
                  "matching", "closed_form", "alpha_T", "norm_constancy", "norm_sum",
                  "norm_vs_mean_T", "kink_current", "oracle_l2", "larmor_relative",
                  "dwell_additivity", "hartman", "causality"});
  auto set = [&](const char* key, double& field) {
    field = get_number(j, w, key, field);
    require(field > 0.0, join(w, key), "tolerance must be positive");
  };
  set("decomposition", t.decomposition);
  set("midpoint", t.midpoint);
  set("oddness", t.oddness);
  set("current", t.current);
  set("unitarity", t.unitarity);
  set("phase_relation", t.phase_relation);
  set("matching", t.matching);
  set("closed_form", t.closed_form);
  set("alpha_T", t.alpha_T);
  set("norm_constancy", t.norm_constancy);
  set("norm_sum", t.norm_sum);
  set("norm_vs_mean_T", t.norm_vs_mean_T);
  set("kink_current", t.kink_current);
  set("oracle_l2", t.oracle_l2);
  set("larmor_relative", t.larmor_relative);
  set("dwell_additivity", t.dwell_additivity);
  set("hartman", t.hartman);
  set("causality", t.causality);
}

}  // namespace

std::vector<double> energy_values(const EnergyRange& r) {
  std::vector<double> e(r.n);
  for (std::size_t i = 0; i < r.n; ++i)
    e[i] = r.n == 1 ? r.min : r.min + (r.max - r.min) * static_cast<double>(i) / (r.n - 1);
  return e;
}

EnergyRange parse_energy_range(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos)
    throw ConfigError("energies", "expected min:max:n, got '" + std::string(text) + "'");
  auto number = [&](std::string_view part) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size())
      throw ConfigError("energies", "'" + std::string(part) + "' is not a number");
    return v;
  };
  EnergyRange r;
  r.min = number(text.substr(0, first));
  r.max = number(text.substr(first + 1, second - first - 1));
  const double n = number(text.substr(second + 1));
  if (!(r.min > 0.0)) throw ConfigError("energies", "energies must be positive");
  if (!(r.max >= r.min)) throw ConfigError("energies", "max must not be below min");
  if (!(n >= 1.0) || n != std::floor(n)) throw ConfigError("energies", "n must be a positive integer");
  r.n = static_cast<std::size_t>(n);
  if (r.n > 1 && r.max == r.min) throw ConfigError("energies", "n > 1 needs max > min");
  return r;
}

std::string suggest_key(std::string_view key, std::initializer_list<std::string_view> known) {
  std::string best;
  std::size_t best_d = std::string_view::npos;
  for (std::string_view k : known) {
    std::size_t d = edit_distance(key, k);
    // A key that is a prefix of a known key ("sigma" for "sigma_k") counts as close.
    if (k.size() > key.size() && k.substr(0, key.size()) == key) d = std::min<std::size_t>(d, 1);
    if (d < best_d) {
      best_d = d;
      best = std::string(k);
    }
  }
  const std::size_t limit = std::max<std::size_t>(2, key.size() / 3);
  return best_d <= limit ? best : std::string{};
}

PotentialSpec build_potential(const PotentialConfig& pc) {
  if (pc.type == "rectangular") return make_rectangular(pc.V0, pc.d, pc.xc);
  return sample_symmetric(gaussian_profile(pc.V0, pc.width, pc.xc), pc.x_left, pc.x_right, pc.n);
}

UniformGrid default_evolve_grid(const PotentialSpec& pot, const PacketParams& p, double t_end) {
  const double sx = 0.5 / p.sigma_k;
  const double kmax = p.k0 + 4.0 * p.sigma_k;
  const double front = p.x0 + 2.0 * kmax * t_end + 12.0 * sx;
  const double hi = std::max(front, p.x0 + 12.0 * sx);
  // Reflected packets mirror the incident motion about the left edge.
  const double lo = std::min(p.x0 - 12.0 * sx, 2.0 * pot.x_left() - front);
  const double h = 0.05;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h)) + 1;
  return UniformGrid{lo, hi, n};
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("syntax error: ") + e.what());
  }
  reject_unknown(root, "",
                 {"potential", "packet", "grid", "energies", "snapshots", "t_end", "omega", "bohm",
                  "oracle", "tolerances", "seed", "output"});
  RunConfig cfg;
  if (root.contains("potential")) cfg.potential = parse_potential(root.at("potential"));
  const PotentialSpec pot = build_potential(cfg.potential);

  const json packet = root.value("packet", json::object());
  reject_unknown(packet, "packet", {"k0", "sigma_k", "x0", "nodes"});
  cfg.packet.k0 = get_number(packet, "packet", "k0", cfg.packet.k0);
  cfg.packet.sigma_k = get_number(packet, "packet", "sigma_k", cfg.packet.sigma_k);
  cfg.packet.nodes = get_count(packet, "packet", "nodes", cfg.packet.nodes);
  require(cfg.packet.sigma_k > 0.0, "packet.sigma_k", "must be positive");
  require(cfg.packet.k0 - 4.0 * cfg.packet.sigma_k > 0.0, "packet.sigma_k",
          "k_min = k0 - 4 sigma_k must be positive");
  require(cfg.packet.nodes >= 1, "packet.nodes", "needs at least one node");
  cfg.packet.x0 =
      get_number(packet, "packet", "x0", pot.x_left() - 6.0 / cfg.packet.sigma_k);
  require(cfg.packet.x0 < pot.x_left(), "packet.x0", "packet must start left of the barrier");

  cfg.t_end = get_optional(root, "", "t_end");
  if (cfg.t_end) require(*cfg.t_end > 0.0, "t_end", "must be positive");
  cfg.snapshots = get_count(root, "", "snapshots", cfg.snapshots);
  require(cfg.snapshots >= 2, "snapshots", "needs at least two snapshots");

  if (root.contains("grid") && !root.at("grid").is_null()) {
    const json& g = root.at("grid");
    reject_unknown(g, "grid", {"x_min", "x_max", "n"});
    UniformGrid grid;
    grid.x_min = get_number(g, "grid", "x_min", 0.0);
    grid.x_max = get_number(g, "grid", "x_max", 0.0);
    grid.n = get_count(g, "grid", "n", 0);
    require(grid.x_min < grid.x_max, "grid.x_min", "must be below grid.x_max");
    require(grid.n >= 3, "grid.n", "needs at least 3 points");
    cfg.grid = grid;
  }

  const json en = root.value("energies", json::object());
  reject_unknown(en, "energies", {"min", "max", "n"});
  cfg.energies.min = get_number(en, "energies", "min", cfg.energies.min);
  cfg.energies.max = get_number(en, "energies", "max", cfg.energies.max);
  cfg.energies.n = get_count(en, "energies", "n", cfg.energies.n);
  require(cfg.energies.min > 0.0, "energies.min", "energies must be positive");
  require(cfg.energies.max >= cfg.energies.min, "energies.max", "must not be below energies.min");

  cfg.omega = get_number(root, "", "omega", cfg.omega);
  require(cfg.omega > 0.0, "omega", "Larmor frequency must be positive");

  const json bohm = root.value("bohm", json::object());
  reject_unknown(bohm, "bohm", {"family", "ensemble", "dt", "tolerance"});
  try {
    cfg.bohm.family = parse_family(get_string(bohm, "bohm", "family", "full"));
  } catch (const DomainError& e) {
    throw ConfigError("bohm.family", e.what());
  }
  cfg.bohm.ensemble = get_count(bohm, "bohm", "ensemble", cfg.bohm.ensemble);
  cfg.bohm.dt = get_number(bohm, "bohm", "dt", cfg.bohm.dt);
  cfg.bohm.tolerance = get_number(bohm, "bohm", "tolerance", cfg.bohm.tolerance);
  require(cfg.bohm.dt > 0.0, "bohm.dt", "must be positive");
  require(cfg.bohm.tolerance > 0.0, "bohm.tolerance", "must be positive");

  const json oracle = root.value("oracle", json::object());
  reject_unknown(oracle, "oracle", {"x0", "h", "dt", "t"});
  cfg.oracle.x0 = get_number(oracle, "oracle", "x0", cfg.oracle.x0);
  cfg.oracle.h = get_number(oracle, "oracle", "h", cfg.oracle.h);
  cfg.oracle.dt = get_number(oracle, "oracle", "dt", cfg.oracle.dt);
  cfg.oracle.t = get_optional(oracle, "oracle", "t");
  require(cfg.oracle.x0 < pot.x_left(), "oracle.x0", "packet must start left of the barrier");
  require(cfg.oracle.h > 0.0, "oracle.h", "must be positive");
  require(cfg.oracle.dt > 0.0, "oracle.dt", "must be positive");
  if (cfg.oracle.t) require(*cfg.oracle.t > 0.0, "oracle.t", "must be positive");

  if (root.contains("tolerances")) parse_tolerances(root.at("tolerances"), cfg.tolerances);

  if (root.contains("seed")) {
    const json& s = root.at("seed");
    require(s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0), "seed",
            "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.output = get_string(root, "", "output", cfg.output);
  require(!cfg.output.empty(), "output", "must not be empty");
  return cfg;
}

json to_json(const RunConfig& c) {
  json j;
  const PotentialConfig& p = c.potential;
  if (p.type == "rectangular") {
    j["potential"] = {{"type", p.type}, {"V0", p.V0}, {"d", p.d}, {"xc", p.xc}};
  } else {
    j["potential"] = {{"type", p.type},
                      {"profile", p.profile},
                      {"n", p.n},
                      {"params",
                       {{"V0", p.V0},
                        {"width", p.width},
                        {"xc", p.xc},
                        {"x_left", p.x_left},
                        {"x_right", p.x_right}}}};
  }
  j["packet"] = {{"k0", c.packet.k0},
                 {"sigma_k", c.packet.sigma_k},
                 {"x0", c.packet.x0},
                 {"nodes", c.packet.nodes}};
  j["grid"] = c.grid ? json{{"x_min", c.grid->x_min}, {"x_max", c.grid->x_max}, {"n", c.grid->n}}
                     : json(nullptr);
  j["energies"] = {{"min", c.energies.min}, {"max", c.energies.max}, {"n", c.energies.n}};
  j["snapshots"] = c.snapshots;
  j["t_end"] = c.t_end ? json(*c.t_end) : json(nullptr);
  j["omega"] = c.omega;
  j["bohm"] = {{"family", std::string(to_string(c.bohm.family))},
               {"ensemble", c.bohm.ensemble},
               {"dt", c.bohm.dt},
               {"tolerance", c.bohm.tolerance}};
  j["oracle"] = {{"x0", c.oracle.x0},
                 {"h", c.oracle.h},
                 {"dt", c.oracle.dt},
                 {"t", c.oracle.t ? json(*c.oracle.t) : json(nullptr)}};
  const Tolerances& t = c.tolerances;
  j["tolerances"] = {{"decomposition", t.decomposition},
                     {"midpoint", t.midpoint},
                     {"oddness", t.oddness},
                     {"current", t.current},
                     {"unitarity", t.unitarity},
                     {"phase_relation", t.phase_relation},
                     {"matching", t.matching},
                     {"closed_form", t.closed_form},
                     {"alpha_T", t.alpha_T},
                     {"norm_constancy", t.norm_constancy},
                     {"norm_sum", t.norm_sum},
                     {"norm_vs_mean_T", t.norm_vs_mean_T},
                     {"kink_current", t.kink_current},
                     {"oracle_l2", t.oracle_l2},
                     {"larmor_relative", t.larmor_relative},
                     {"dwell_additivity", t.dwell_additivity},
                     {"hartman", t.hartman},
                     {"causality", t.causality}};
  j["seed"] = c.seed;
  j["output"] = c.output;
  return j;
}

std::string_view config_schema() {
  static constexpr std::string_view schema = R"json({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "tunnelsplit run configuration",
  "type": "object",
  "additionalProperties": false,
  "properties": {
    "potential": {
      "oneOf": [
        {
          "type": "object",
          "additionalProperties": false,
          "required": ["type"],
          "properties": {
            "type": {"const": "rectangular"},
            "V0": {"type": "number", "default": 2},
            "d": {"type": "number", "exclusiveMinimum": 0, "default": 1},
            "xc": {"type": "number", "default": 0}
          }
        },
        {
          "type": "object",
          "additionalProperties": false,
          "required": ["type"],
          "properties": {
            "type": {"const": "sampled"},
            "profile": {"const": "gaussian"},
            "n": {"type": "integer", "minimum": 1, "default": 64},
            "params": {
              "type": "object",
              "additionalProperties": false,
              "properties": {
                "V0": {"type": "number", "default": 2},
                "width": {"type": "number", "exclusiveMinimum": 0, "default": 1},
                "xc": {"type": "number", "default": 0},
                "x_left": {"type": "number", "description": "default xc - 4 width"},
                "x_right": {"type": "number", "description": "default xc + 4 width"}
              }
            }
          }
        }
      ]
    },
    "packet": {
      "type": "object",
      "additionalProperties": false,
      "description": "k0 - 4 sigma_k must be positive",
      "properties": {
        "k0": {"type": "number", "default": 1},
        "sigma_k": {"type": "number", "exclusiveMinimum": 0, "default": 0.1},
        "x0": {"type": ["number", "null"], "description": "default x_left - 6 / sigma_k"},
        "nodes": {"type": "integer", "minimum": 1, "default": 512}
      }
    },
    "grid": {
      "type": ["object", "null"],
      "additionalProperties": false,
      "description": "evolve grid; derived from the packet and t_end when null",
      "properties": {
        "x_min": {"type": "number"},
        "x_max": {"type": "number"},
        "n": {"type": "integer", "minimum": 3}
      }
    },
    "energies": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "min": {"type": "number", "exclusiveMinimum": 0, "default": 0.1},
        "max": {"type": "number", "default": 4.0},
        "n": {"type": "integer", "minimum": 0, "default": 200}
      }
    },
    "snapshots": {"type": "integer", "minimum": 2, "default": 20},
    "t_end": {"type": ["number", "null"], "description": "default 4 (|x0 - xc| + d) / (2 k0)"},
    "omega": {"type": "number", "exclusiveMinimum": 0, "default": 1e-4},
    "bohm": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "family": {"enum": ["full", "tr", "ref", "tilde_tr", "tilde_ref"], "default": "full"},
        "ensemble": {"type": "integer", "minimum": 0, "default": 200},
        "dt": {"type": "number", "exclusiveMinimum": 0, "default": 0.05},
        "tolerance": {"type": "number", "exclusiveMinimum": 0, "default": 1e-7}
      }
    },
    "oracle": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "x0": {"type": "number", "default": -20},
        "h": {"type": "number", "exclusiveMinimum": 0, "default": 0.01},
        "dt": {"type": "number", "exclusiveMinimum": 0, "default": 1e-4},
        "t": {"type": ["number", "null"], "description": "default: mid-collision time |x0 - xc| / (2 k0)"}
      }
    },
    "tolerances": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "decomposition": {"type": "number", "default": 1e-12},
        "midpoint": {"type": "number", "default": 1e-12},
        "oddness": {"type": "number", "default": 1e-10},
        "current": {"type": "number", "default": 1e-10},
        "unitarity": {"type": "number", "default": 1e-12},
        "phase_relation": {"type": "number", "default": 1e-10},
        "matching": {"type": "number", "default": 1e-12},
        "closed_form": {"type": "number", "default": 1e-6},
        "alpha_T": {"type": "number", "default": 1e-10},
        "norm_constancy": {"type": "number", "default": 1e-6},
        "norm_sum": {"type": "number", "default": 1e-6},
        "norm_vs_mean_T": {"type": "number", "default": 1e-5},
        "kink_current": {"type": "number", "default": 1e-8},
        "oracle_l2": {"type": "number", "default": 1e-4},
        "larmor_relative": {"type": "number", "default": 0.01},
        "dwell_additivity": {"type": "number", "default": 1e-8},
        "hartman": {"type": "number", "default": 0.05},
        "causality": {"type": "number", "default": 0.01}
      }
    },
    "seed": {"type": "integer", "minimum": 0, "default": 20240531},
    "output": {"type": "string", "default": "out"}
  }
}
)json";
  return schema;
}

}  // namespace tunnelsplit
