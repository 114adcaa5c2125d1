#include "tunnelsplit/decompose.hpp"

#include <algorithm>
#include <cmath>

#include "tunnelsplit/error.hpp"

namespace tunnelsplit {

DecomposedState decompose(const PotentialSpec& pot, double E) {
  DecomposedState d;
  d.E = E;
  auto [full, amps] = solve_full(pot, E);
  d.full = std::move(full);
  d.amps = amps;
  d.odd = solve_odd(pot, E);
  d.odd_left = d.odd.left_waves();

  ScaledComplex c{cplx{0.0, 0.0}, 0};
  if (amps.b != cplx{0.0, 0.0}) {
    // beta_v may lie far outside double range for opaque barriers, so the
    // ratio is formed from mantissas.
    const auto [w, exp2] = d.odd.left_waves_scaled();
    const double mag = std::abs(w.backward);
    if (!(std::isfinite(mag)) || std::log2(std::max(mag, 1e-320)) + exp2 < std::log2(1e-300))
      throw NumericalError("odd solution has no outgoing wave on the left (|beta_v| < 1e-300)");
    c = ScaledComplex{amps.b / w.backward, -exp2};
  }
  d.c = c.value();
  d.ref = d.odd.scaled(c);
  d.tr = combine(ScaledComplex{}, d.full, ScaledComplex{cplx{-1.0, 0.0}, 0}, d.ref);
  const PlaneWaves rl = d.ref.left_waves();
  d.alpha = rl.forward;
  d.beta = rl.backward;
  return d;
}

KinkValue TruncatedPair::tilde_tr(double x) const {
  const double xc = dec_.xc();
  if (x < xc) {
    const auto f = dec_.tr.eval(x);
    return {f.psi, f.dpsi, f.dpsi};
  }
  const auto f = dec_.full.eval(x);
  if (x > xc) return {f.psi, f.dpsi, f.dpsi};
  const auto l = dec_.tr.eval(x);
  return {f.psi, l.dpsi, f.dpsi};
}

KinkValue TruncatedPair::tilde_ref(double x) const {
  const double xc = dec_.xc();
  if (x > xc) return {};
  const auto f = dec_.ref.eval(x);
  if (x < xc) return {f.psi, f.dpsi, f.dpsi};
  return {cplx{0.0, 0.0}, f.dpsi, cplx{0.0, 0.0}};
}

std::pair<double, double> TruncatedPair::tilde_tr_current_limits() const {
  const double xc = dec_.xc();
  const auto l = dec_.tr.eval(xc);
  const auto r = dec_.full.eval(xc);
  return {2.0 * std::imag(std::conj(l.psi) * l.dpsi), 2.0 * std::imag(std::conj(r.psi) * r.dpsi)};
}

TruncatedPair truncate(DecomposedState dec) { return TruncatedPair(std::move(dec)); }

UniquenessReport verify_uniqueness(const PotentialSpec& pot, double E, cplx perturbation,
                                   double tolerance) {
  const DecomposedState d = decompose(pot, E);
  const cplx c = d.c + perturbation;
  const StationaryState ref = d.odd.scaled(ScaledComplex{c, 0});
  const StationaryState tr =
      combine(ScaledComplex{}, d.full, ScaledComplex{cplx{-1.0, 0.0}, 0}, ref);

  UniquenessReport rep;
  rep.perturbation = perturbation;
  auto add = [&](std::string name, double residual) {
    ConstraintCheck chk{std::move(name), residual, tolerance, residual > tolerance};
    rep.any_violated = rep.any_violated || chk.violated;
    rep.constraints.push_back(std::move(chk));
  };

  const double xc = d.xc();
  add("beta_equals_b", std::abs(ref.left_waves().backward - d.amps.b));
  add("tr_no_outgoing_wave", std::abs(tr.left_waves().backward));
  const double j_full = d.full.current(d.full.x_right() + 1.0);
  const double j_tr = tr.current(tr.x_left() - 1.0);
  add("current_equality", std::abs(j_tr - j_full) / std::max(std::abs(j_full), 1e-300));

  double odd_res = 0.0;
  double scale = 0.0;
  const double half = 0.5 * pot.width() + 2.0;
  for (int i = 0; i <= 200; ++i) {
    const double s = half * i / 200.0;
    const cplx a = ref.eval(xc + s).psi;
    const cplx b = ref.eval(xc - s).psi;
    odd_res = std::max(odd_res, std::abs(a + b));
    scale = std::max(scale, std::abs(a));
  }
  add("ref_odd_about_midpoint", scale > 0.0 ? odd_res / scale : 0.0);
  add("ref_zero_at_midpoint", scale > 0.0 ? std::abs(ref.eval(xc).psi) / scale : 0.0);
  add("tr_equals_full_at_midpoint", std::abs(tr.eval(xc).psi - d.full.eval(xc).psi));

  rep.indistinguishable_at_tolerance = perturbation != cplx{0.0, 0.0} && !rep.any_violated;
  return rep;
}

}  // namespace tunnelsplit
