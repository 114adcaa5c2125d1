#pragma once

#include <functional>
#include <span>
#include <vector>

namespace tunnelsplit {

// Units throughout: hbar = 1 and 2m = 1, so E = k^2, the group velocity is 2k
// and the probability current of exp(ikx) is 2k.

/// One constant-height piece of a barrier.
struct Segment {
  double x_left;
  double x_right;
  double V;
};

/// A mirror-symmetric piecewise-constant barrier with V = 0 outside
/// [x_left(), x_right()]. Immutable once built.
class PotentialSpec {
 public:
  /// Validates that `segments` tile a finite interval without gaps and are
  /// mirror-symmetric about its midpoint (heights compared exactly).
  /// Throws DomainError otherwise.
  static PotentialSpec from_segments(std::vector<Segment> segments);

  /// Skips the symmetry check. Only for negative-control tests of the
  /// invariant suite; every solver still rejects the result.
  static PotentialSpec unchecked(std::vector<Segment> segments);

  std::span<const Segment> segments() const noexcept { return segments_; }
  double x_left() const noexcept { return segments_.front().x_left; }
  double x_right() const noexcept { return segments_.back().x_right; }
  double midpoint() const noexcept { return xc_; }
  double width() const noexcept { return x_right() - x_left(); }
  double max_value() const noexcept;
  bool is_symmetric() const noexcept { return symmetric_; }

  /// V(x); zero outside the support. On an interior breakpoint the segment
  /// to the right wins.
  double value(double x) const noexcept;

  /// Mean of V over [a, b] (a < b), exact for the piecewise-constant profile.
  double cell_average(double a, double b) const noexcept;

  /// Largest |V(xc + s) - V(xc - s)| over the segment midpoints and
  /// breakpoints. Zero for every validated spec.
  double symmetry_residual() const noexcept;

  /// Same geometry with dV added on the support (Larmor spin splitting).
  PotentialSpec shifted(double dV) const;

 private:
  PotentialSpec(std::vector<Segment> segments, bool symmetric);

  std::vector<Segment> segments_;
  double xc_ = 0.0;
  bool symmetric_ = false;
};

/// Single segment of height V0 and width d centred on xc.
PotentialSpec make_rectangular(double V0, double d, double xc = 0.0);

/// Midpoint sampling of a smooth profile on n equal segments of [x_l, x_r].
/// Mirror pairs are averaged so the result is exactly symmetric.
PotentialSpec sample_symmetric(const std::function<double(double)>& profile, double x_l,
                               double x_r, std::size_t n);

/// V0 * exp(-(x - xc)^2 / (2 width^2)).
std::function<double(double)> gaussian_profile(double V0, double width, double xc);

}  // namespace tunnelsplit
