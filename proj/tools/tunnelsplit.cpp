// tunnelsplit: command-line front end.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tunnelsplit/config.hpp"
#include "tunnelsplit/error.hpp"
#include "tunnelsplit/scenarios.hpp"

namespace ts = tunnelsplit;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ts::ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Options {
  std::string config;
  std::string out;
  std::string energies;
  std::string family;
  std::optional<std::size_t> snapshots;
  std::optional<double> omega;
  std::optional<std::size_t> ensemble;
};

ts::RunConfig load(const Options& o) {
  ts::RunConfig cfg = ts::parse_config(o.config.empty() ? std::string("{}") : read_file(o.config));
  if (!o.out.empty()) cfg.output = o.out;
  if (!o.energies.empty()) cfg.energies = ts::parse_energy_range(o.energies);
  if (o.snapshots) {
    if (*o.snapshots < 2) throw ts::ConfigError("snapshots", "need at least 2 snapshots");
    cfg.snapshots = *o.snapshots;
  }
  if (o.omega) {
    if (!(*o.omega > 0.0)) throw ts::ConfigError("omega", "must be positive");
    cfg.omega = *o.omega;
  }
  if (o.ensemble) {
    if (*o.ensemble == 0) throw ts::ConfigError("bohm.ensemble", "must be positive");
    cfg.bohm.ensemble = *o.ensemble;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattering on symmetric barriers split into transmission and reflection subensembles"};
  app.require_subcommand(0, 1);
  bool show_version = false, show_schema = false;
  app.add_flag("--version", show_version, "Print the version and exit");
  app.add_flag("--schema", show_schema, "Print the config JSON schema and exit");

  Options o;
  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory (overrides \"output\")");
  };
  auto* dec = app.add_subcommand("decompose", "Amplitudes and decomposition residuals per energy");
  common(dec);
  dec->add_option("--energies", o.energies, "Energy grid min:max:n");
  auto* evo = app.add_subcommand("evolve", "Packet snapshots of one state family");
  common(evo);
  evo->add_option("--family", o.family, "full, tr, ref, tilde_tr or tilde_ref")->default_str("full");
  evo->add_option("--snapshots", o.snapshots, "Number of snapshots");
  auto* tim = app.add_subcommand("times", "Dwell, group and Larmor times");
  common(tim);
  tim->add_option("--energies", o.energies, "Energy grid min:max:n");
  tim->add_option("--omega", o.omega, "Larmor frequency");
  auto* boh = app.add_subcommand("bohm", "Bohmian trajectory ensemble");
  common(boh);
  boh->add_option("--family", o.family, "full, tr, ref, tilde_tr or tilde_ref");
  boh->add_option("--ensemble", o.ensemble, "Number of trajectories");
  auto* ora = app.add_subcommand("oracle", "Crank-Nicolson against spectral synthesis");
  common(ora);
  auto* chk = app.add_subcommand("check", "Run every invariant and write a report");
  common(chk);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ts::exit_ok : ts::exit_usage;
  }

  if (show_version) {
    std::cout << "tunnelsplit " << TUNNELSPLIT_VERSION << "\n";
    return ts::exit_ok;
  }
  if (show_schema) {
    std::cout << ts::config_schema() << "\n";
    return ts::exit_ok;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return ts::exit_usage;
  }

  ts::RunConfig cfg;
  std::optional<ts::Family> family;
  try {
    cfg = load(o);
    if (!o.family.empty()) family = ts::parse_family(o.family);
  } catch (const ts::Error& e) {
    std::cerr << "tunnelsplit: config error: " << e.what() << "\n";
    return ts::exit_usage;
  }

  const std::filesystem::path out = cfg.output;
  try {
    if (dec->parsed()) return ts::run_decompose(cfg, out);
    if (evo->parsed()) return ts::run_evolve(cfg, family.value_or(ts::Family::full), out);
    if (tim->parsed()) return ts::run_times(cfg, out);
    if (boh->parsed()) {
      if (family) cfg.bohm.family = *family;
      return ts::run_bohm(cfg, out);
    }
    if (ora->parsed()) return ts::run_oracle(cfg, out);
    if (chk->parsed()) {
      const int rc = ts::run_check_scenario(cfg, out);
      std::cerr << "tunnelsplit check: " << (rc == 0 ? "all invariants passed" : "invariant failures")
                << ", report in " << (out / "report.json").string() << "\n";
      return rc;
    }
  } catch (const ts::DomainError& e) {
    std::cerr << "tunnelsplit: invalid parameters: " << e.what() << "\n";
    return ts::exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "tunnelsplit: " << e.what() << "\n";
    return ts::exit_invariant_failure;
  }
  return ts::exit_usage;
}
