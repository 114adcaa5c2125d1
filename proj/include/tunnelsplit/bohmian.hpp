#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tunnelsplit/wavepacket.hpp"

namespace tunnelsplit {

enum class Fate { transmitted, reflected, undecided };

std::string_view to_string(Fate f) noexcept;

struct TrajectorySample {
  double t = 0.0;
  double x = 0.0;
};

struct Trajectory {
  Family family = Family::full;
  std::vector<TrajectorySample> samples;
  Fate fate = Fate::undecided;
  double max_speed = 0.0;
  std::string diagnostic;

  double x_start() const { return samples.front().x; }
  double x_end() const { return samples.back().x; }
  /// Linear interpolation between accepted steps, clamped to the ends.
  double position_at(double t) const;
};

/// rho_floor(t) = 1e-12 * N / (sqrt(2 pi) sigma(t)), the peak of a freely
/// spreading packet of norm N (1 for full, tr and ref; the spectral T and R
/// averages for tilde_tr and tilde_ref), sigma(t)^2 = sigma_x^2 + 4 sigma_k^2 t^2.
double density_floor(const SpectralPacket& p, double t);

/// v = j / rho. Throws NumericalError ("node vacuum") when rho <= rho_floor.
double velocity(const SpectralPacket& p, double x, double t);

struct IntegrationOptions {
  double t_start = 0.0;
  double t_end = 0.0;  ///< <= t_start selects traversal_window(p)
  double dt = 0.05;    ///< initial and largest step
  double tolerance = 1e-7;
};

/// Time after which the packet has cleared the barrier at the slowest group
/// velocity in its spectrum; fates are not decided earlier.
double collision_window_end(const SpectralPacket& p);

/// Embedded Runge-Kutta-Fehlberg 4(5), propagating the 4th-order solution.
/// A step that meets rho <= rho_floor is halved; after 8 halvings the
/// trajectory stops as undecided with a diagnostic. Integration ends at
/// t_end, or once past the collision window the particle is outside the
/// support and moving away from it.
Trajectory integrate(const SpectralPacket& p, double x0, const IntegrationOptions& opt = {});

/// Fate by final position: beyond xc + 1e-3 d transmitted, below xc - 1e-3 d
/// reflected.
Fate classify(const PotentialSpec& pot, double x_final);

/// n inverse-CDF samples of the family's density at t, drawn with a seeded
/// mt19937_64 over [x0 - 12 sigma_x, x0 + 12 sigma_x].
std::vector<double> sample_starts(const SpectralPacket& p, std::size_t n, std::uint64_t seed,
                                  double t = 0.0);

std::vector<Trajectory> integrate_ensemble(const SpectralPacket& p, const std::vector<double>& starts,
                                           const IntegrationOptions& opt = {});

/// Bisects [a, b] to 1e-4 d for the start separating reflected from
/// transmitted trajectories. Throws DomainError when the endpoints share a
/// fate, naming the fates found.
double critical_point(const SpectralPacket& full, double a, double b,
                      const IntegrationOptions& opt = {});

}  // namespace tunnelsplit
