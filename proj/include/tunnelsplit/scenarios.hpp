#pragma once

#include <filesystem>

#include "tunnelsplit/config.hpp"

namespace tunnelsplit {

/// Process exit codes shared by the CLI and the scenario runners.
enum ExitCode : int { exit_ok = 0, exit_invariant_failure = 1, exit_usage = 2 };

// Each runner writes its files plus manifest.json into `out` and returns an
// ExitCode. Library errors propagate as exceptions.

/// decompose.csv: amplitudes and invariant residuals per energy.
int run_decompose(const RunConfig& cfg, const std::filesystem::path& out);

/// snapshot_NNN.csv (x, Re psi, Im psi, rho, j) for one family.
int run_evolve(const RunConfig& cfg, Family family, const std::filesystem::path& out);

/// times.csv over the energy range and hartman.csv over barrier widths.
int run_times(const RunConfig& cfg, const std::filesystem::path& out);

/// trajectories.csv and fates.json for cfg.bohm.family.
int run_bohm(const RunConfig& cfg, const std::filesystem::path& out);

/// Crank-Nicolson against spectral synthesis; exit 1 above the L2 tolerance.
int run_oracle(const RunConfig& cfg, const std::filesystem::path& out);

/// report.json of the full invariant suite; exit 1 if any invariant fails.
int run_check_scenario(const RunConfig& cfg, const std::filesystem::path& out);

}  // namespace tunnelsplit
