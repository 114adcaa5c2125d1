#pragma once

#include <string>
#include <vector>

#include "tunnelsplit/stationary.hpp"

namespace tunnelsplit {

/// psi_full = psi_tr + psi_ref at one energy.
///
/// psi_ref = c * v, where v is the real solution odd about the barrier
/// midpoint, and c is fixed by requiring the outgoing (exp(-ikx)) wave of
/// psi_ref on the left to equal the reflected wave b of psi_full. psi_tr is
/// then left with a pure incoming wave (1 - alpha) exp(ikx) on the left.
struct DecomposedState {
  double E = 0.0;
  StationaryState full;
  StationaryState tr;
  StationaryState ref;
  StationaryState odd;  ///< v, with v(xc) = 0 and v'(xc) = 1
  ScatteringAmplitudes amps;
  cplx c;      ///< psi_ref = c * v
  cplx alpha;  ///< incoming amplitude of psi_ref on the left
  cplx beta;   ///< outgoing amplitude of psi_ref on the left (equals b)
  PlaneWaves odd_left;  ///< (alpha_v, beta_v) of v on the left

  double xc() const noexcept { return full.midpoint(); }
};

/// Throws DomainError for E <= 0 or an asymmetric potential, and
/// NumericalError if the odd solution carries no outgoing wave on the left.
DecomposedState decompose(const PotentialSpec& pot, double E);

/// psi and the one-sided derivatives of a truncated field. Away from xc the
/// two derivatives coincide.
struct KinkValue {
  cplx psi;
  cplx dpsi_left;
  cplx dpsi_right;
};

/// The subensemble functions joined at the midpoint:
///   tilde_ref = psi_ref for x <= xc, 0 for x >= xc;
///   tilde_tr  = psi_tr  for x <= xc, psi_full for x >= xc.
/// Both are continuous at xc; their derivatives are not.
class TruncatedPair {
 public:
  explicit TruncatedPair(DecomposedState dec) : dec_(std::move(dec)) {}

  KinkValue tilde_tr(double x) const;
  KinkValue tilde_ref(double x) const;

  /// One-sided currents of tilde_tr at xc: {from psi_tr, from psi_full}.
  std::pair<double, double> tilde_tr_current_limits() const;

  const DecomposedState& decomposition() const noexcept { return dec_; }

 private:
  DecomposedState dec_;
};

TruncatedPair truncate(DecomposedState dec);

/// Outcome of checking one defining constraint of the decomposition.
struct ConstraintCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool violated = false;
};

struct UniquenessReport {
  cplx perturbation;
  std::vector<ConstraintCheck> constraints;
  bool any_violated = false;
  /// Perturbation is nonzero but every residual is below tolerance.
  bool indistinguishable_at_tolerance = false;
};

/// Replaces c by c + perturbation and reports which constraints break.
UniquenessReport verify_uniqueness(const PotentialSpec& pot, double E, cplx perturbation,
                                   double tolerance = 1e-10);

}  // namespace tunnelsplit
