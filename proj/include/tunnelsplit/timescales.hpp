#pragma once

#include <span>
#include <string>
#include <vector>

#include "tunnelsplit/wavepacket.hpp"

namespace tunnelsplit {

/// Probability in the barrier region divided by the family's own incident
/// current: 2k for full, 2k|1 - alpha|^2 for tilde_tr, 2k|alpha|^2 for
/// tilde_ref. Throws DomainError for other families and NumericalError when
/// that current is below 1e-300.
double dwell_time(const PotentialSpec& pot, double E, Family family);

/// The three dwell times at one energy together with the interference term
/// 2 Re int_{x_l}^{xc} conj(psi_tr) psi_ref dx / (2k), which is what
/// separates tau_full from T tau_tr + R tau_ref.
struct DwellBreakdown {
  double T = 0.0;
  double R = 0.0;
  double tau_full = 0.0;
  double tau_tr = 0.0;
  double tau_ref = 0.0;
  double cross = 0.0;

  /// tau_full - (T tau_tr + R tau_ref)
  double raw_residual() const noexcept { return tau_full - (T * tau_tr + R * tau_ref); }
  /// tau_full - (T tau_tr + R tau_ref + cross)
  double corrected_residual() const noexcept { return raw_residual() - cross; }
};

/// Requires 0 < R < 1 so both subensemble times exist.
DwellBreakdown dwell_breakdown(const PotentialSpec& pot, double E);

/// d(arg a)/dE + d/(2k) by centred differences with step 1e-5 E and one
/// Richardson step. The step shrinks tenfold when the phase increment is not
/// resolved; NumericalError after 5 reductions.
double group_delay(const PotentialSpec& pot, double E);

struct LarmorTimes {
  double tau_y = 0.0;
  double tau_z = 0.0;
  double omega = 0.0;
};

/// Spin-up/down scattering on the support raised/lowered by omega/2:
/// tau_y = -(arg a_+ - arg a_-)/omega, tau_z = (ln|a_+| - ln|a_-|)/omega.
/// Throws DomainError for omega <= 0; warns when omega > 0.01 E.
LarmorTimes larmor_times(const PotentialSpec& pot, double E, double omega);

struct TimeTableRow {
  double E = 0.0;
  double T = 0.0;
  double R = 0.0;
  double tau_dwell_full = 0.0;
  double tau_dwell_tr = 0.0;
  double tau_dwell_ref = 0.0;
  double tau_cross = 0.0;
  double tau_group = 0.0;
  double tau_larmor_y = 0.0;
  double tau_larmor_z = 0.0;
  double omega = 0.0;
  bool flagged = false;
  std::string note;
};

/// One row per energy, computed in parallel. A failing quantity becomes NaN
/// and flags its row with the error text.
std::vector<TimeTableRow> time_table(const PotentialSpec& pot, std::span<const double> energies,
                                     double omega);

/// int_a^b |psi|^2 for a stationary state of `pot`, Gauss-Legendre on each piece.
double density_integral(const PotentialSpec& pot, const StationaryState& s, double a, double b);

}  // namespace tunnelsplit
