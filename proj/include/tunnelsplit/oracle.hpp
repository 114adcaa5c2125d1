#pragma once

#include <cstddef>
#include <vector>

#include "tunnelsplit/wavepacket.hpp"

namespace tunnelsplit {

struct EvolverConfig {
  UniformGrid grid;
  double dt = 1e-4;
  /// Density at either wall that aborts the run.
  double edge_limit = 1e-8;
  /// Steps between edge-density checks.
  std::size_t monitor_every = 100;
};

/// (I + i dt/2 H) psi_{n+1} = (I - i dt/2 H) psi_n with H = -D2 + V on a
/// uniform grid, hard walls at both ends, V the cell average over
/// [x_j - h/2, x_j + h/2]. The tridiagonal factorisation is computed once.
class CrankNicolson {
 public:
  CrankNicolson(const EvolverConfig& cfg, const PotentialSpec& pot);

  void step(std::vector<cplx>& psi) const;
  const EvolverConfig& config() const noexcept { return cfg_; }

 private:
  EvolverConfig cfg_;
  cplx off_;                 // off-diagonal of I + i dt/2 H
  std::vector<cplx> diag_b_;  // diagonal of I - i dt/2 H
  std::vector<cplx> cprime_;  // Thomas forward sweep
  std::vector<cplx> inv_denom_;
};

/// Advances `initial` (sampled on cfg.grid) by `steps` steps. psi' of the
/// result is a central difference. Throws NumericalError ("grid too small")
/// when the wall density exceeds cfg.edge_limit, DomainError on a grid
/// mismatch.
GridField evolve(const EvolverConfig& cfg, const PotentialSpec& pot, const GridField& initial,
                 std::size_t steps);

struct Distance {
  double l2 = 0.0;
  double max_pointwise = 0.0;
};

/// Throws DomainError unless both fields share grid and time.
Distance compare(const GridField& a, const GridField& b);

/// A Crank-Nicolson run of a full-state packet and its spectral counterpart.
struct SpectralComparison {
  GridField initial;
  GridField cn;
  GridField spectral;
  std::size_t steps = 0;
  Distance distance;
};

/// Evolves p (sampled at t = 0) to time t on [x0 - margin, xc + margin] with
/// spacing h and compares against field_at(p, grid, t).
SpectralComparison compare_with_spectral(const SpectralPacket& p, double t, double h, double dt,
                                         double margin);

}  // namespace tunnelsplit
