#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "tunnelsplit/potential.hpp"

namespace tunnelsplit {

using cplx = std::complex<double>;

/// Value and spatial derivative of a wave function at one point.
struct FieldValue {
  cplx psi;
  cplx dpsi;
};

/// psi = forward * exp(ikx) + backward * exp(-ikx) in a free region.
/// Phases are referenced to x = 0, never to a barrier edge.
struct PlaneWaves {
  cplx forward;
  cplx backward;
};

/// Amplitudes for unit incidence exp(ikx) from the left: transmitted
/// a exp(ikx) on the right, reflected b exp(-ikx) on the left.
struct ScatteringAmplitudes {
  cplx a;
  cplx b;
  double T = 0.0;
  double R = 0.0;
};

/// Complex number with a separate power-of-two exponent: m * 2^e.
struct ScaledComplex {
  cplx m{1.0, 0.0};
  int e = 0;
  cplx value() const;
};

/// A solution of -psi'' + V psi = E psi, stored per piece of the barrier
/// (segments split at the midpoint) in a local basis:
///   plane waves exp(+-iq(x - x0))              for E > V with q*len >= 1e-2,
///   exp(-kappa(x1 - x)), exp(-kappa(x - x0))   for E < V with kappa*len > 1,
///   (psi(x0), psi'(x0)) with cos/cosh and sinc  otherwise (including E = V).
/// Each piece carries its own power-of-two scale, so opaque segments neither
/// overflow nor lose the decaying component to cancellation.
class StationaryState {
 public:
  StationaryState() = default;

  double energy() const noexcept { return E_; }
  double wavenumber() const noexcept { return k_; }
  double x_left() const noexcept { return pieces_.front().x0; }
  double x_right() const noexcept { return pieces_.back().x1; }
  double midpoint() const noexcept { return xc_; }
  bool empty() const noexcept { return pieces_.empty(); }

  /// psi(x) and psi'(x), using the plane-wave forms outside the support.
  FieldValue eval(double x) const;

  /// j(x) = 2 Im(conj(psi) psi').
  double current(double x) const;

  PlaneWaves left_waves() const;
  PlaneWaves right_waves() const;

  /// Left plane-wave amplitudes as mantissas sharing the exponent `.second`;
  /// usable when the amplitudes themselves exceed double range.
  std::pair<PlaneWaves, int> left_waves_scaled() const;

  /// Piece boundaries from x_left() to x_right(); always contains midpoint().
  std::vector<double> breakpoints() const;

  /// factor * (*this).
  StationaryState scaled(ScaledComplex factor) const;

  /// cu * u + cv * v. Both states must come from the same potential and energy.
  friend StationaryState combine(ScaledComplex cu, const StationaryState& u,
                                 ScaledComplex cv, const StationaryState& v);

  /// Implementation access for the solvers.
  struct Access;

 private:
  enum class Basis : unsigned char { taylor, plane_wave, exponential };

  struct Piece {
    double x0 = 0.0;
    double x1 = 0.0;
    double lambda = 0.0;  // E - V
    double q = 0.0;       // sqrt(|E - V|)
    Basis basis = Basis::taylor;
    cplx c1, c2;
    int exp2 = 0;
  };

  struct FreeRegion {
    cplx forward, backward;
    int exp2 = 0;
  };

  FieldValue eval_piece(const Piece& p, double x) const;

  double E_ = 0.0;
  double k_ = 0.0;
  double xc_ = 0.0;
  std::vector<Piece> pieces_;
  FreeRegion left_{};
  FreeRegion right_{};
};

/// Scattering state for unit incidence from the left, with its amplitudes.
/// Throws DomainError for E <= 0 or an asymmetric potential.
std::pair<StationaryState, ScatteringAmplitudes> solve_full(const PotentialSpec& pot, double E);

/// Real solution v that is odd about the midpoint: v(xc) = 0, v'(xc) = 1.
/// The two halves are integrated independently outward from xc, so oddness
/// is a checkable property rather than a construction.
StationaryState solve_odd(const PotentialSpec& pot, double E);

/// Plane-wave amplitudes read off from psi, psi' at a point of a free region.
PlaneWaves extract_plane_waves(const FieldValue& f, double k, double x);

}  // namespace tunnelsplit
