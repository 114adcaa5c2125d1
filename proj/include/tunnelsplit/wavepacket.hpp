#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <tuple>
#include <vector>

#include "tunnelsplit/decompose.hpp"

namespace tunnelsplit {

enum class Family { full, tr, ref, tilde_tr, tilde_ref };

std::string_view to_string(Family f) noexcept;

/// Throws DomainError naming the accepted values.
Family parse_family(std::string_view name);

/// True for the families joined at the midpoint.
constexpr bool is_truncated(Family f) noexcept {
  return f == Family::tilde_tr || f == Family::tilde_ref;
}

struct PacketParams {
  double k0 = 1.0;
  double sigma_k = 0.1;
  double x0 = -60.0;
  std::size_t nodes = 512;
};

/// Uniform grid x_i = x_min + i * (x_max - x_min) / (n - 1).
struct UniformGrid {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t n = 0;

  double spacing() const noexcept { return (x_max - x_min) / static_cast<double>(n - 1); }
  double at(std::size_t i) const noexcept;
};

/// psi and psi' on a grid at one instant. When the barrier midpoint falls on
/// a grid point of a truncated family, dpsi holds the left limit there and
/// both one-sided derivatives are kept in `kink`.
struct GridField {
  struct Kink {
    std::size_t index = 0;
    cplx dpsi_left;
    cplx dpsi_right;
  };

  std::vector<double> x;
  std::vector<cplx> psi;
  std::vector<cplx> dpsi;
  double t = 0.0;
  std::optional<Kink> kink;
};

/// Decomposed stationary states at the quadrature nodes, shared by every
/// family built from the same potential and spectrum.
struct SpectralBasis;

/// psi(x, t) = sum_i w_i psi_family(x; k_i) exp(-i k_i^2 t) with Gauss-Legendre
/// nodes on [k0 - 4 sigma_k, k0 + 4 sigma_k] and
///   phi(k) = [exp(-u^2/4) - exp(-4) (5 - u^2/4)] exp(-i k x0),  u = (k - k0)/sigma_k,
/// the Gaussian less its tangent (in u^2) at the cut, so phi and phi' vanish
/// at the ends of the support. Normalised so the full family has unit norm.
class SpectralPacket {
 public:
  Family family() const noexcept { return family_; }
  const PacketParams& params() const noexcept;
  const PotentialSpec& potential() const noexcept;
  std::size_t size() const noexcept;
  std::span<const double> wavenumbers() const noexcept;
  /// w_i, including the quadrature weight, phi and the normalisation.
  std::span<const cplx> weights() const noexcept;
  const TruncatedPair& node_state(std::size_t i) const;

  double k_min() const noexcept;
  double k_max() const noexcept;

  /// The same spectrum and cached states viewed as another family.
  SpectralPacket with_family(Family f) const;

  /// psi and the one-sided derivatives at one point.
  KinkValue eval(double x, double t) const;

  friend SpectralPacket build_packet(const PotentialSpec& pot, Family family,
                                     const PacketParams& params);
  friend double mean_transmission(const SpectralPacket& p);

 private:
  SpectralPacket(std::shared_ptr<const SpectralBasis> basis, Family f)
      : basis_(std::move(basis)), family_(f) {}

  std::shared_ptr<const SpectralBasis> basis_;
  Family family_;
};

/// Throws DomainError if k0 - 4 sigma_k <= 0, sigma_k <= 0 or nodes == 0.
/// Warns when x0 lies closer than 6 / sigma_k to the barrier.
SpectralPacket build_packet(const PotentialSpec& pot, Family family, const PacketParams& params);

GridField field_at(const SpectralPacket& p, const UniformGrid& grid, double t);

/// Trapezoid integral of |psi|^2. Warns if the density at either grid edge
/// exceeds `edge_threshold`.
double norm(const GridField& f, double edge_threshold = 1e-12);

/// Density at the two grid edges, max of both.
double edge_density(const GridField& f);

/// j = 2 Im(conj(psi) psi') at the grid point x. Throws DomainError if x is
/// not on the grid.
double current_density(const GridField& f, double x);

/// {left, right} limits of j at the kink; equal values when there is none.
std::pair<double, double> kink_current_limits(const GridField& f);

struct Moments {
  double mean = 0.0;
  double spread = 0.0;
  double mass = 0.0;
};

/// First and second moments of |psi|^2 restricted to [a, b], integrating the
/// linear interpolant of the grid values. Throws NumericalError when the
/// contained mass is below 1e-12.
Moments centroid_and_spread(const GridField& f, double a, double b);

/// Probability in [a, b]; never throws.
double mass_in(const GridField& f, double a, double b);

/// Spectral average of T weighted by |phi|^2, the norm the transmitted
/// subensemble should carry.
double mean_transmission(const SpectralPacket& p);

/// End of the default snapshot window, 4 (|x0 - xc| + d) / (2 k0).
double traversal_window(const SpectralPacket& p);

}  // namespace tunnelsplit
