#include "tunnelsplit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tunnelsplit/error.hpp"

namespace tunnelsplit {

CrankNicolson::CrankNicolson(const EvolverConfig& cfg, const PotentialSpec& pot) : cfg_(cfg) {
  const UniformGrid& g = cfg.grid;
  if (g.n < 3 || !(g.x_min < g.x_max)) throw DomainError("oracle grid needs n >= 3 and x_min < x_max");
  if (!(cfg.dt > 0.0)) throw DomainError("oracle time step must be positive");
  const double h = g.spacing();
  const cplx half_i{0.0, 0.5 * cfg.dt};
  const double lap = 1.0 / (h * h);
  const std::size_t m = g.n - 2;  // interior unknowns
  off_ = -half_i * lap;
  diag_b_.resize(m);
  std::vector<cplx> diag_a(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double x = g.at(j + 1);
    const double V = pot.cell_average(x - 0.5 * h, x + 0.5 * h);
    diag_a[j] = 1.0 + half_i * (2.0 * lap + V);
    diag_b_[j] = 1.0 - half_i * (2.0 * lap + V);
  }
  cprime_.resize(m);
  inv_denom_.resize(m);
  inv_denom_[0] = 1.0 / diag_a[0];
  cprime_[0] = off_ * inv_denom_[0];
  for (std::size_t j = 1; j < m; ++j) {
    inv_denom_[j] = 1.0 / (diag_a[j] - off_ * cprime_[j - 1]);
    cprime_[j] = off_ * inv_denom_[j];
  }
}

void CrankNicolson::step(std::vector<cplx>& psi) const {
  const std::size_t m = diag_b_.size();
  // rhs = (I - i dt/2 H) psi, then forward sweep in place.
  const cplx off_b = -off_;
  cplx prev = psi[0];  // wall value, zero
  cplx d_prev{};
  for (std::size_t j = 0; j < m; ++j) {
    const cplx cur = psi[j + 1];
    const cplx rhs = diag_b_[j] * cur + off_b * (prev + psi[j + 2]);
    prev = cur;
    d_prev = (rhs - off_ * d_prev) * inv_denom_[j];
    psi[j + 1] = d_prev;
  }
  for (std::size_t j = m - 1; j-- > 0;) psi[j + 1] -= cprime_[j] * psi[j + 2];
  psi.front() = psi.back() = cplx{};
}

namespace {

void check_grid(const UniformGrid& g, const GridField& f) {
  if (f.x.size() != g.n || f.psi.size() != g.n)
    throw DomainError("initial field does not match the oracle grid");
  const double tol = 1e-9 * g.spacing();
  if (std::abs(f.x.front() - g.x_min) > tol || std::abs(f.x.back() - g.x_max) > tol)
    throw DomainError("initial field does not match the oracle grid");
}

}  // namespace

GridField evolve(const EvolverConfig& cfg, const PotentialSpec& pot, const GridField& initial,
                 std::size_t steps) {
  check_grid(cfg.grid, initial);
  const CrankNicolson cn(cfg, pot);
  std::vector<cplx> psi = initial.psi;
  psi.front() = psi.back() = cplx{};
  const std::size_t every = std::max<std::size_t>(1, cfg.monitor_every);
  auto monitor = [&](std::size_t n) {
    const double edge = std::max(std::norm(psi[1]), std::norm(psi[psi.size() - 2]));
    if (edge > cfg.edge_limit)
      throw NumericalError("grid too small: wall density " + std::to_string(edge) + " after " +
                           std::to_string(n) + " steps");
  };
  for (std::size_t n = 0; n < steps; ++n) {
    cn.step(psi);
    if ((n + 1) % every == 0) monitor(n + 1);
  }
  monitor(steps);

  GridField out;
  out.x = initial.x;
  out.t = initial.t + static_cast<double>(steps) * cfg.dt;
  out.dpsi.assign(psi.size(), cplx{});
  const double h = cfg.grid.spacing();
  for (std::size_t j = 1; j + 1 < psi.size(); ++j) out.dpsi[j] = (psi[j + 1] - psi[j - 1]) / (2.0 * h);
  out.psi = std::move(psi);
  return out;
}

Distance compare(const GridField& a, const GridField& b) {
  if (a.x.size() != b.x.size() || a.psi.size() != b.psi.size() || a.x.size() < 2)
    throw DomainError("grid mismatch: fields have different sizes");
  const double h = a.x[1] - a.x[0];
  for (std::size_t j = 0; j < a.x.size(); ++j)
    if (std::abs(a.x[j] - b.x[j]) > 1e-9 * h) throw DomainError("grid mismatch at index " + std::to_string(j));
  if (std::abs(a.t - b.t) > 1e-9 * std::max(1.0, std::abs(a.t)))
    throw DomainError("fields are at different times");
  Distance d;
  double s = 0.0;
  for (std::size_t j = 0; j < a.x.size(); ++j) {
    const double e = std::norm(a.psi[j] - b.psi[j]);
    d.max_pointwise = std::max(d.max_pointwise, std::sqrt(e));
    if (j + 1 < a.x.size()) {
      const double e1 = std::norm(a.psi[j + 1] - b.psi[j + 1]);
      s += 0.5 * (a.x[j + 1] - a.x[j]) * (e + e1);
    }
  }
  d.l2 = std::sqrt(s);
  return d;
}

SpectralComparison compare_with_spectral(const SpectralPacket& p, double t, double h, double dt,
                                         double margin) {
  if (!(h > 0.0) || !(dt > 0.0) || !(t >= 0.0) || !(margin > 0.0))
    throw DomainError("oracle needs h > 0, dt > 0, t >= 0 and margin > 0");
  const double lo = p.params().x0 - margin;
  const double hi = p.potential().midpoint() + margin;
  const auto cells = static_cast<std::size_t>(std::llround((hi - lo) / h));
  const UniformGrid grid{lo, lo + h * static_cast<double>(cells), cells + 1};

  SpectralComparison out;
  out.initial = field_at(p, grid, 0.0);
  out.steps = static_cast<std::size_t>(std::llround(t / dt));
  out.cn = evolve(EvolverConfig{grid, dt, 1e-8, 100}, p.potential(), out.initial, out.steps);
  out.spectral = field_at(p, grid, out.cn.t);
  out.distance = compare(out.spectral, out.cn);
  return out;
}

}  // namespace tunnelsplit
