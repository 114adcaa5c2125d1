#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tunnelsplit/config.hpp"
#include "tunnelsplit/decompose.hpp"

namespace tunnelsplit {

struct InvariantResult {
  std::string name;
  std::string group;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct CheckReport {
  std::vector<InvariantResult> entries;

  bool all_passed() const;
  std::size_t failures() const;
  nlohmann::json to_json() const;
};

/// Worst residuals of one stationary solve, each relative to the natural
/// scale of the quantity.
struct StationaryResiduals {
  double matching = 0.0;        ///< psi, psi' jump across breakpoints
  double current = 0.0;         ///< max |j(x) - j_right| / |j_right|
  double unitarity = 0.0;       ///< |T + R - 1|
  double phase_relation = 0.0;  ///< |Re(a conj(b) exp(2ik xc))|
  double odd_oddness = 0.0;     ///< max |v(xc + s) + v(xc - s)| / max |v|
  double odd_normalisation = 0.0;  ///< |v(xc)| + |v'(xc) - 1|
  double odd_current = 0.0;     ///< max |j_v| / max |v v'|
};

StationaryResiduals measure_stationary(const PotentialSpec& pot, double E,
                                       std::size_t grid_points = 1000);

struct DecompositionResiduals {
  double sum = 0.0;                ///< max |psi_tr + psi_ref - psi_full|
  double midpoint = 0.0;           ///< |psi_ref(xc)| / max |psi_ref|
  double oddness = 0.0;            ///< max |psi_ref(xc+s) + psi_ref(xc-s)| / max |psi_ref|
  double alpha_beta = 0.0;         ///< ||alpha| - |beta||
  double beta_b = 0.0;             ///< |beta - b|
  double current = 0.0;            ///< max |j_tr(x) - j_full| / |j_full|
  double tr_outgoing = 0.0;        ///< left exp(-ikx) amplitude of psi_tr
  double midpoint_equality = 0.0;  ///< |psi_tr(xc) - psi_full(xc)|
  double alpha_T = 0.0;            ///< ||1 - alpha|^2 - T|
  double truncated_sum = 0.0;      ///< max |tilde_tr + tilde_ref - psi_full|
  double tilde_ref_right = 0.0;    ///< max |tilde_ref(x)| over x >= xc
  double tilde_tr_current = 0.0;   ///< relative jump of j(tilde_tr) at xc
};

DecompositionResiduals measure_decomposition(const PotentialSpec& pot, const DecomposedState& d,
                                             std::size_t grid_points = 1000);

/// Random mirror-symmetric barrier: 1 to 3 steps per half, heights in
/// [0.1, 2.5], step widths in [0.05, 0.5], midpoint in [-2, 2].
PotentialSpec random_symmetric_barrier(std::mt19937_64& rng);

struct CheckOptions {
  /// Replaces the configured potential, bypassing validation (negative
  /// controls for the symmetry invariant).
  std::optional<PotentialSpec> potential_override;
  bool include_oracle = true;
  bool include_bohm = true;
};

/// Runs every invariant against the configuration. Failures are entries,
/// never exceptions.
CheckReport run_check(const RunConfig& cfg, const CheckOptions& opt = {});

}  // namespace tunnelsplit
