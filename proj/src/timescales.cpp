#include "tunnelsplit/timescales.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tunnelsplit/error.hpp"
#include "tunnelsplit/log.hpp"
#include "tunnelsplit/parallel.hpp"
#include "tunnelsplit/quadrature.hpp"

namespace tunnelsplit {

namespace {

constexpr std::size_t kOrder = 16;

const QuadratureRule& unit_rule() {
  static const QuadratureRule rule = gauss_legendre(kOrder, 0.0, 1.0);
  return rule;
}

// Sub-intervals of [a, b] bounded by the state's breakpoints, each short
// enough that the local solution varies by a bounded number of e-folds or
// radians.
template <class Fn>
void for_each_panel(const StationaryState& s, const PotentialSpec& pot, double a, double b,
                    Fn&& fn) {
  std::vector<double> cuts{a};
  for (double x : s.breakpoints())
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  const double E = s.energy();
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const double V = pot.value(0.5 * (lo + hi));
    const double rate = std::sqrt(std::abs(E - V));
    const auto m = static_cast<std::size_t>(std::ceil(rate * (hi - lo) / 2.0)) + 1;
    const double h = (hi - lo) / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) fn(lo + j * h, j + 1 == m ? hi : lo + (j + 1) * h);
  }
}

template <class F>
double integrate(const StationaryState& s, const PotentialSpec& pot, double a, double b, F&& f) {
  const QuadratureRule& r = unit_rule();
  double sum = 0.0;
  for_each_panel(s, pot, a, b, [&](double lo, double hi) {
    double part = 0.0;
    for (std::size_t q = 0; q < kOrder; ++q) part += r.weights[q] * f(lo + (hi - lo) * r.nodes[q]);
    sum += part * (hi - lo);
  });
  return sum;
}

struct BarrierIntegrals {
  double full = 0.0;      // int_{xl}^{xr} |psi_full|^2
  double tr_left = 0.0;   // int_{xl}^{xc} |psi_tr|^2
  double full_right = 0.0;
  double ref_left = 0.0;
  double cross_left = 0.0;  // 2 Re int_{xl}^{xc} conj(psi_tr) psi_ref
};

BarrierIntegrals barrier_integrals(const PotentialSpec& pot, const DecomposedState& d) {
  const double xl = pot.x_left(), xr = pot.x_right(), xc = d.xc();
  BarrierIntegrals out;
  auto rho = [](const StationaryState& s) {
    return [&s](double x) { return std::norm(s.eval(x).psi); };
  };
  out.full = integrate(d.full, pot, xl, xr, rho(d.full));
  out.full_right = integrate(d.full, pot, xc, xr, rho(d.full));
  out.tr_left = integrate(d.full, pot, xl, xc, rho(d.tr));
  out.ref_left = integrate(d.full, pot, xl, xc, rho(d.ref));
  out.cross_left = integrate(d.full, pot, xl, xc, [&](double x) {
    return 2.0 * std::real(std::conj(d.tr.eval(x).psi) * d.ref.eval(x).psi);
  });
  return out;
}

double checked_flux(double j, const char* family) {
  if (!(j >= 1e-300))
    throw NumericalError(std::string("incident current of ") + family +
                         " is below 1e-300; dwell time undefined");
  return j;
}

cplx transmission(const PotentialSpec& pot, double E) { return solve_full(pot, E).second.a; }

}  // namespace

double density_integral(const PotentialSpec& pot, const StationaryState& s, double a, double b) {
  return integrate(s, pot, a, b, [&s](double x) { return std::norm(s.eval(x).psi); });
}

double dwell_time(const PotentialSpec& pot, double E, Family family) {
  if (family != Family::full && family != Family::tilde_tr && family != Family::tilde_ref)
    throw DomainError("dwell time is defined for full, tilde_tr and tilde_ref");
  const DecomposedState d = decompose(pot, E);
  const double k = std::sqrt(E);
  const BarrierIntegrals I = barrier_integrals(pot, d);
  switch (family) {
    case Family::tilde_tr:
      return (I.tr_left + I.full_right) /
             checked_flux(2.0 * k * std::norm(cplx{1.0, 0.0} - d.alpha), "tilde_tr");
    case Family::tilde_ref:
      return I.ref_left / checked_flux(2.0 * k * std::norm(d.alpha), "tilde_ref");
    default:
      return I.full / (2.0 * k);
  }
}

DwellBreakdown dwell_breakdown(const PotentialSpec& pot, double E) {
  const DecomposedState d = decompose(pot, E);
  const double k = std::sqrt(E);
  const BarrierIntegrals I = barrier_integrals(pot, d);
  DwellBreakdown out;
  out.T = d.amps.T;
  out.R = d.amps.R;
  out.tau_full = I.full / (2.0 * k);
  out.tau_tr =
      (I.tr_left + I.full_right) / checked_flux(2.0 * k * std::norm(cplx{1.0, 0.0} - d.alpha), "tilde_tr");
  out.tau_ref = I.ref_left / checked_flux(2.0 * k * std::norm(d.alpha), "tilde_ref");
  out.cross = I.cross_left / (2.0 * k);
  return out;
}

double group_delay(const PotentialSpec& pot, double E) {
  if (!(E > 0.0)) throw DomainError("energy must be positive");
  double h = 1e-5 * E;
  auto slope = [&](double step) {
    const cplx up = transmission(pot, E + step);
    const cplx dn = transmission(pot, E - step);
    const double dphi = std::arg(up * std::conj(dn));
    return std::pair{dphi / (2.0 * step), std::abs(dphi)};
  };
  for (int attempt = 0; attempt <= 5; ++attempt, h *= 0.1) {
    const auto [d1, jump1] = slope(h);
    const auto [d2, jump2] = slope(0.5 * h);
    // An increment near pi means the branch of arg is ambiguous.
    if (jump1 > 1.0 || jump2 > 1.0) continue;
    const double refined = (4.0 * d2 - d1) / 3.0;
    if (!std::isfinite(refined)) continue;
    return refined + pot.width() / (2.0 * std::sqrt(E));
  }
  throw NumericalError("transmission phase could not be unwrapped after 5 step reductions");
}

LarmorTimes larmor_times(const PotentialSpec& pot, double E, double omega) {
  if (!(omega > 0.0)) throw DomainError("Larmor frequency must be positive");
  if (!(E > 0.0)) throw DomainError("energy must be positive");
  if (omega > 0.01 * E) log::warn("Larmor frequency exceeds 0.01 E; weak-field limit not reached");
  const cplx up = transmission(pot.shifted(0.5 * omega), E);
  const cplx dn = transmission(pot.shifted(-0.5 * omega), E);
  LarmorTimes out;
  out.omega = omega;
  out.tau_y = -std::arg(up * std::conj(dn)) / omega;
  out.tau_z = (std::log(std::abs(up)) - std::log(std::abs(dn))) / omega;
  return out;
}

std::vector<TimeTableRow> time_table(const PotentialSpec& pot, std::span<const double> energies,
                                     double omega) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  return parallel_map(energies.size(), [&](std::size_t i) {
    TimeTableRow row;
    row.E = energies[i];
    row.omega = omega;
    auto attempt = [&](auto&& fn) {
      try {
        fn();
      } catch (const Error& e) {
        row.flagged = true;
        if (!row.note.empty()) row.note += "; ";
        row.note += e.what();
      }
    };
    row.T = row.R = row.tau_dwell_full = row.tau_dwell_tr = row.tau_dwell_ref = nan;
    row.tau_cross = row.tau_group = row.tau_larmor_y = row.tau_larmor_z = nan;
    attempt([&] {
      const DecomposedState d = decompose(pot, row.E);
      const double k = std::sqrt(row.E);
      const BarrierIntegrals I = barrier_integrals(pot, d);
      row.T = d.amps.T;
      row.R = d.amps.R;
      row.tau_dwell_full = I.full / (2.0 * k);
      row.tau_cross = I.cross_left / (2.0 * k);
      attempt([&] {
        row.tau_dwell_tr = (I.tr_left + I.full_right) /
                           checked_flux(2.0 * k * std::norm(cplx{1.0, 0.0} - d.alpha), "tilde_tr");
      });
      attempt([&] {
        row.tau_dwell_ref = I.ref_left / checked_flux(2.0 * k * std::norm(d.alpha), "tilde_ref");
      });
    });
    attempt([&] { row.tau_group = group_delay(pot, row.E); });
    attempt([&] {
      const LarmorTimes l = larmor_times(pot, row.E, omega);
      row.tau_larmor_y = l.tau_y;
      row.tau_larmor_z = l.tau_z;
    });
    return row;
  });
}

}  // namespace tunnelsplit
