#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tunnelsplit/oracle.hpp"
#include "tunnelsplit/wavepacket.hpp"

namespace tunnelsplit {

struct PotentialConfig {
  std::string type = "rectangular";  // rectangular | sampled
  double V0 = 2.0;
  double d = 1.0;
  double xc = 0.0;
  // sampled gaussian only
  std::string profile = "gaussian";
  double width = 1.0;
  double x_left = -4.0;
  double x_right = 4.0;
  std::size_t n = 64;
};

struct EnergyRange {
  double min = 0.1;
  double max = 4.0;
  std::size_t n = 200;
};

/// n evenly spaced energies from min to max inclusive.
std::vector<double> energy_values(const EnergyRange& r);

/// "a:b:n" -> EnergyRange. Throws ConfigError("energies", ...).
EnergyRange parse_energy_range(std::string_view text);

struct BohmConfig {
  Family family = Family::full;
  std::size_t ensemble = 200;
  double dt = 0.05;
  double tolerance = 1e-7;
};

struct OracleConfig {
  double x0 = -20.0;
  double h = 0.01;
  double dt = 1e-4;
  std::optional<double> t;  ///< comparison time; mid-collision when absent
};

/// Invariant tolerances; each can be overridden under "tolerances".
struct Tolerances {
  double decomposition = 1e-12;
  double midpoint = 1e-12;
  double oddness = 1e-10;
  double current = 1e-10;
  double unitarity = 1e-12;
  double phase_relation = 1e-10;
  double matching = 1e-12;
  double closed_form = 1e-6;
  double alpha_T = 1e-10;
  double norm_constancy = 1e-6;
  double norm_sum = 1e-6;
  double norm_vs_mean_T = 1e-5;
  double kink_current = 1e-8;
  double oracle_l2 = 1e-4;
  double larmor_relative = 0.01;
  double dwell_additivity = 1e-8;
  double hartman = 0.05;
  double causality = 0.01;
};

struct RunConfig {
  PotentialConfig potential;
  PacketParams packet;           // x0 resolved from the potential when absent
  std::optional<UniformGrid> grid;  // evolve grid; derived when absent
  EnergyRange energies;
  std::size_t snapshots = 20;
  std::optional<double> t_end;   // traversal window when absent
  double omega = 1e-4;
  BohmConfig bohm;
  OracleConfig oracle;
  Tolerances tolerances;
  std::uint64_t seed = 20240531;
  std::string output = "out";
};

/// Parses and validates a JSON document, filling defaults. Throws
/// ConfigError naming the offending key; unknown keys come with the closest
/// known key as a suggestion.
RunConfig parse_config(std::string_view text);

/// The effective configuration, defaults included, as canonical JSON.
nlohmann::json to_json(const RunConfig& cfg);

/// JSON Schema of the config file.
std::string_view config_schema();

PotentialSpec build_potential(const PotentialConfig& pc);

/// Grid for packet snapshots wide enough that both outgoing packets stay
/// inside it up to t_end.
UniformGrid default_evolve_grid(const PotentialSpec& pot, const PacketParams& p, double t_end);

/// Closest candidate to `key` by edit distance, or empty if none is close.
std::string suggest_key(std::string_view key, std::initializer_list<std::string_view> known);

}  // namespace tunnelsplit
