#include "tunnelsplit/wavepacket.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "tunnelsplit/error.hpp"
#include "tunnelsplit/log.hpp"
#include "tunnelsplit/parallel.hpp"
#include "tunnelsplit/quadrature.hpp"

namespace tunnelsplit {

namespace {

constexpr std::size_t kBlock = 512;
constexpr std::size_t kReseed = 32;

struct FreeWaves {
  PlaneWaves left;
  PlaneWaves right;
};

}  // namespace

struct SpectralBasis {
  PotentialSpec pot;
  PacketParams params;
  std::vector<double> k;
  std::vector<double> q;       // quadrature weights
  std::vector<double> phi;     // real envelope
  std::vector<cplx> w;         // normalised weights
  std::vector<TruncatedPair> states;
  // Plane-wave amplitudes outside the support, per family and node.
  std::vector<FreeWaves> waves[5];
};

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::full: return "full";
    case Family::tr: return "tr";
    case Family::ref: return "ref";
    case Family::tilde_tr: return "tilde_tr";
    case Family::tilde_ref: return "tilde_ref";
  }
  return "full";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::full, Family::tr, Family::ref, Family::tilde_tr, Family::tilde_ref})
    if (name == to_string(f)) return f;
  throw DomainError("unknown family '" + std::string(name) +
                    "' (expected full, tr, ref, tilde_tr or tilde_ref)");
}

double UniformGrid::at(std::size_t i) const noexcept {
  if (i + 1 == n) return x_max;
  return x_min + static_cast<double>(i) * spacing();
}

const PacketParams& SpectralPacket::params() const noexcept { return basis_->params; }
const PotentialSpec& SpectralPacket::potential() const noexcept { return basis_->pot; }
std::size_t SpectralPacket::size() const noexcept { return basis_->k.size(); }
std::span<const double> SpectralPacket::wavenumbers() const noexcept { return basis_->k; }
std::span<const cplx> SpectralPacket::weights() const noexcept { return basis_->w; }
const TruncatedPair& SpectralPacket::node_state(std::size_t i) const { return basis_->states.at(i); }
double SpectralPacket::k_min() const noexcept {
  return basis_->params.k0 - 4.0 * basis_->params.sigma_k;
}
double SpectralPacket::k_max() const noexcept {
  return basis_->params.k0 + 4.0 * basis_->params.sigma_k;
}

SpectralPacket SpectralPacket::with_family(Family f) const { return SpectralPacket(basis_, f); }

namespace {

KinkValue family_value(const TruncatedPair& tp, Family f, double x) {
  const DecomposedState& d = tp.decomposition();
  auto plain = [x](const StationaryState& s) {
    const FieldValue v = s.eval(x);
    return KinkValue{v.psi, v.dpsi, v.dpsi};
  };
  switch (f) {
    case Family::full: return plain(d.full);
    case Family::tr: return plain(d.tr);
    case Family::ref: return plain(d.ref);
    case Family::tilde_tr: return tp.tilde_tr(x);
    case Family::tilde_ref: return tp.tilde_ref(x);
  }
  return {};
}

FreeWaves family_waves(const DecomposedState& d, Family f) {
  switch (f) {
    case Family::full: return {d.full.left_waves(), d.full.right_waves()};
    case Family::tr: return {d.tr.left_waves(), d.tr.right_waves()};
    case Family::ref: return {d.ref.left_waves(), d.ref.right_waves()};
    case Family::tilde_tr: return {d.tr.left_waves(), d.full.right_waves()};
    case Family::tilde_ref: return {d.ref.left_waves(), PlaneWaves{}};
  }
  return {};
}

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

// exp(-s/4) minus its tangent at the cut s = 16 (s = u^2): non-negative by
// convexity, zero with zero slope at |u| = 4. A hard cut leaves 1/x tails in
// the spatial packet; this leaves 1/x^3.
double envelope(double u) {
  const double s = u * u;
  if (s >= 16.0) return 0.0;
  return std::exp(-0.25 * s) - std::exp(-4.0) * (5.0 - 0.25 * s);
}

}  // namespace

SpectralPacket build_packet(const PotentialSpec& pot, Family family, const PacketParams& params) {
  if (!(params.sigma_k > 0.0)) throw DomainError("sigma_k must be positive");
  if (!(params.k0 - 4.0 * params.sigma_k > 0.0))
    throw DomainError("k_min = k0 - 4 sigma_k must be positive");
  if (params.nodes == 0) throw DomainError("packet needs at least one quadrature node");
  if (std::abs(params.x0 - pot.x_left()) < 6.0 / params.sigma_k)
    log::warn("packet start x0 lies within 6/sigma_k of the barrier edge");

  auto b = std::make_shared<SpectralBasis>(SpectralBasis{pot, params, {}, {}, {}, {}, {}, {}});
  const double kmin = params.k0 - 4.0 * params.sigma_k;
  const double kmax = params.k0 + 4.0 * params.sigma_k;
  QuadratureRule rule = gauss_legendre(params.nodes, kmin, kmax);
  b->k = std::move(rule.nodes);
  b->q = std::move(rule.weights);
  const std::size_t n = b->k.size();
  b->phi.resize(n);
  double parseval = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (b->k[i] - params.k0) / params.sigma_k;
    b->phi[i] = envelope(u);
    parseval += b->q[i] * b->phi[i] * b->phi[i];
  }
  // Outside the barrier the full family at t = 0 is the free packet, whose
  // norm is 2 pi int |phi|^2 dk.
  const double scale = 1.0 / std::sqrt(2.0 * std::numbers::pi * parseval);
  b->w.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    b->w[i] = scale * b->q[i] * b->phi[i] * expi(-b->k[i] * params.x0);

  std::vector<std::optional<TruncatedPair>> states(n);
  parallel_for(n, [&](std::size_t i) {
    states[i].emplace(truncate(decompose(pot, b->k[i] * b->k[i])));
  });
  b->states.reserve(n);
  for (auto& s : states) b->states.push_back(std::move(*s));
  for (Family f : {Family::full, Family::tr, Family::ref, Family::tilde_tr, Family::tilde_ref}) {
    auto& dst = b->waves[static_cast<int>(f)];
    dst.reserve(n);
    for (const auto& s : b->states) dst.push_back(family_waves(s.decomposition(), f));
  }
  return SpectralPacket(std::move(b), family);
}

KinkValue SpectralPacket::eval(double x, double t) const {
  const SpectralBasis& b = *basis_;
  const auto& waves = b.waves[static_cast<int>(family_)];
  const double xl = b.pot.x_left();
  const double xr = b.pot.x_right();
  KinkValue out{};
  for (std::size_t i = 0; i < b.k.size(); ++i) {
    const double k = b.k[i];
    const cplx c = b.w[i] * expi(-k * k * t);
    if (x < xl || x > xr) {
      const PlaneWaves& pw = x < xl ? waves[i].left : waves[i].right;
      const cplx e = expi(k * x);
      const cplx f = c * pw.forward * e;
      const cplx g = c * pw.backward * std::conj(e);
      out.psi += f + g;
      const cplx d = cplx{0.0, k} * (f - g);
      out.dpsi_left += d;
      out.dpsi_right += d;
    } else {
      const KinkValue v = family_value(b.states[i], family_, x);
      out.psi += c * v.psi;
      out.dpsi_left += c * v.dpsi_left;
      out.dpsi_right += c * v.dpsi_right;
    }
  }
  return out;
}

GridField field_at(const SpectralPacket& p, const UniformGrid& grid, double t) {
  if (grid.n < 2 || !(grid.x_min < grid.x_max))
    throw DomainError("grid needs n >= 2 points and x_min < x_max");
  GridField f;
  f.t = t;
  f.x.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) f.x[j] = grid.at(j);
  f.psi.assign(grid.n, cplx{});
  f.dpsi.assign(grid.n, cplx{});

  const PotentialSpec& pot = p.potential();
  const double xl = pot.x_left();
  const double xr = pot.x_right();
  const double xc = pot.midpoint();
  const double h = grid.spacing();
  std::optional<std::size_t> kink_index;
  if (is_truncated(p.family())) {
    const double s = (xc - grid.x_min) / h;
    const double r = std::round(s);
    if (r >= 0.0 && r < static_cast<double>(grid.n) && std::abs(s - r) < 1e-9) {
      kink_index = static_cast<std::size_t>(r);
      f.x[*kink_index] = xc;
    }
  }

  const auto k = p.wavenumbers();
  const auto w = p.weights();
  const std::size_t blocks = (grid.n + kBlock - 1) / kBlock;
  std::vector<cplx> kink_right(blocks);
  parallel_for(blocks, [&](std::size_t blk) {
    const std::size_t lo = blk * kBlock;
    const std::size_t hi = std::min(grid.n, lo + kBlock);
    for (std::size_t i = 0; i < k.size(); ++i) {
      const double ki = k[i];
      const cplx c = w[i] * expi(-ki * ki * t);
      const FreeWaves fw = [&] {
        const DecomposedState& d = p.node_state(i).decomposition();
        return family_waves(d, p.family());
      }();
      const cplx lf = c * fw.left.forward, lb = c * fw.left.backward;
      const cplx rf = c * fw.right.forward, rb = c * fw.right.backward;
      const cplx step = expi(ki * h);
      cplx e{};
      std::size_t since = kReseed;
      for (std::size_t j = lo; j < hi; ++j) {
        const double x = f.x[j];
        if (x < xl || x > xr) {
          if (since >= kReseed) {
            e = expi(ki * x);
            since = 0;
          } else {
            e *= step;
          }
          ++since;
          const cplx a = x < xl ? lf : rf;
          const cplx bb = x < xl ? lb : rb;
          const cplx fwd = a * e;
          const cplx bwd = bb * std::conj(e);
          f.psi[j] += fwd + bwd;
          f.dpsi[j] += cplx{0.0, ki} * (fwd - bwd);
        } else {
          since = kReseed;
          const KinkValue v = family_value(p.node_state(i), p.family(), x);
          f.psi[j] += c * v.psi;
          f.dpsi[j] += c * v.dpsi_left;
          if (kink_index && j == *kink_index) kink_right[blk] += c * v.dpsi_right;
        }
      }
    }
  });
  if (kink_index) {
    const std::size_t blk = *kink_index / kBlock;
    f.kink = GridField::Kink{*kink_index, f.dpsi[*kink_index], kink_right[blk]};
  }
  return f;
}

double edge_density(const GridField& f) {
  if (f.psi.empty()) return 0.0;
  return std::max(std::norm(f.psi.front()), std::norm(f.psi.back()));
}

double norm(const GridField& f, double edge_threshold) {
  if (f.x.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < f.x.size(); ++j)
    s += 0.5 * (f.x[j + 1] - f.x[j]) * (std::norm(f.psi[j]) + std::norm(f.psi[j + 1]));
  if (edge_density(f) > edge_threshold)
    log::warn("density at the grid edge exceeds " + std::to_string(edge_threshold) +
              "; norm is truncated");
  return s;
}

double current_density(const GridField& f, double x) {
  const auto it = std::lower_bound(f.x.begin(), f.x.end(), x);
  std::size_t j = static_cast<std::size_t>(it - f.x.begin());
  const double tol = 1e-9 * (f.x.size() > 1 ? f.x[1] - f.x[0] : 1.0);
  if (j < f.x.size() && std::abs(f.x[j] - x) <= tol) {
  } else if (j > 0 && std::abs(f.x[j - 1] - x) <= tol) {
    --j;
  } else {
    throw DomainError("current requested off the grid");
  }
  return 2.0 * std::imag(std::conj(f.psi[j]) * f.dpsi[j]);
}

std::pair<double, double> kink_current_limits(const GridField& f) {
  if (!f.kink) return {0.0, 0.0};
  const cplx psi = f.psi[f.kink->index];
  return {2.0 * std::imag(std::conj(psi) * f.kink->dpsi_left),
          2.0 * std::imag(std::conj(psi) * f.kink->dpsi_right)};
}

namespace {

// Integrals of rho, x rho, x^2 rho over [a, b] with rho linear between grid
// points.
std::array<double, 3> restricted_moments(const GridField& f, double a, double b) {
  std::array<double, 3> m{0.0, 0.0, 0.0};
  if (f.x.size() < 2 || !(a < b)) return m;
  for (std::size_t j = 0; j + 1 < f.x.size(); ++j) {
    const double x0 = f.x[j], x1 = f.x[j + 1];
    const double lo = std::max(a, x0), hi = std::min(b, x1);
    if (!(lo < hi)) continue;
    const double r0 = std::norm(f.psi[j]), r1 = std::norm(f.psi[j + 1]);
    auto rho = [&](double x) { return r0 + (r1 - r0) * (x - x0) / (x1 - x0); };
    // Two-point Gauss is exact for the cubic x^2 rho(x).
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    const double g = half / std::sqrt(3.0);
    for (double x : {mid - g, mid + g}) {
      const double r = rho(x) * half;
      m[0] += r;
      m[1] += r * x;
      m[2] += r * x * x;
    }
  }
  return m;
}

}  // namespace

Moments centroid_and_spread(const GridField& f, double a, double b) {
  const auto m = restricted_moments(f, a, b);
  if (!(m[0] >= 1e-12))
    throw NumericalError("undefined centroid: region holds probability below 1e-12");
  Moments out;
  out.mass = m[0];
  out.mean = m[1] / m[0];
  out.spread = std::sqrt(std::max(0.0, m[2] / m[0] - out.mean * out.mean));
  return out;
}

double mass_in(const GridField& f, double a, double b) { return restricted_moments(f, a, b)[0]; }

double mean_transmission(const SpectralPacket& p) {
  const SpectralBasis& b = *p.basis_;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < b.k.size(); ++i) {
    const double wq = b.q[i] * b.phi[i] * b.phi[i];
    num += wq * b.states[i].decomposition().amps.T;
    den += wq;
  }
  return num / den;
}

double traversal_window(const SpectralPacket& p) {
  const auto& pr = p.params();
  return 4.0 * (std::abs(pr.x0 - p.potential().midpoint()) + p.potential().width()) / (2.0 * pr.k0);
}

}  // namespace tunnelsplit
