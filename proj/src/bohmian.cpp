#include "tunnelsplit/bohmian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "tunnelsplit/error.hpp"
#include "tunnelsplit/parallel.hpp"

namespace tunnelsplit {

std::string_view to_string(Fate f) noexcept {
  switch (f) {
    case Fate::transmitted: return "transmitted";
    case Fate::reflected: return "reflected";
    case Fate::undecided: return "undecided";
  }
  return "undecided";
}

double Trajectory::position_at(double t) const {
  if (samples.empty()) return 0.0;
  if (t <= samples.front().t) return samples.front().x;
  if (t >= samples.back().t) return samples.back().x;
  const auto it = std::lower_bound(samples.begin(), samples.end(), t,
                                   [](const TrajectorySample& s, double v) { return s.t < v; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  return a.x + (b.x - a.x) * (t - a.t) / (b.t - a.t);
}

double density_floor(const SpectralPacket& p, double t) {
  const double sk = p.params().sigma_k;
  const double sx = 0.5 / sk;
  const double sigma = std::sqrt(sx * sx + 4.0 * sk * sk * t * t);
  double mass = 1.0;
  if (p.family() == Family::tilde_tr) mass = mean_transmission(p);
  if (p.family() == Family::tilde_ref) mass = 1.0 - mean_transmission(p);
  return 1e-12 * mass / (std::sqrt(2.0 * std::numbers::pi) * sigma);
}

namespace {

struct Sample {
  double v = 0.0;
  bool vacuum = false;
};

Sample try_velocity(const SpectralPacket& p, double x, double t) {
  const KinkValue f = p.eval(x, t);
  const double rho = std::norm(f.psi);
  if (!(rho > density_floor(p, t))) return {0.0, true};
  return {2.0 * std::imag(std::conj(f.psi) * f.dpsi_left) / rho, false};
}

}  // namespace

double velocity(const SpectralPacket& p, double x, double t) {
  const Sample s = try_velocity(p, x, t);
  if (s.vacuum) throw NumericalError("node vacuum: density below rho_floor at x = " + std::to_string(x));
  return s.v;
}

double collision_window_end(const SpectralPacket& p) {
  const PotentialSpec& pot = p.potential();
  const double sx = 0.5 / p.params().sigma_k;
  const double reach = std::abs(pot.midpoint() - p.params().x0) + pot.width() + 4.0 * sx;
  return reach / (2.0 * p.k_min());
}

Fate classify(const PotentialSpec& pot, double x_final) {
  const double eps = 1e-3 * pot.width();
  if (x_final > pot.midpoint() + eps) return Fate::transmitted;
  if (x_final < pot.midpoint() - eps) return Fate::reflected;
  return Fate::undecided;
}

Trajectory integrate(const SpectralPacket& p, double x0, const IntegrationOptions& opt) {
  // Fehlberg 4(5) tableau.
  static constexpr double c[6] = {0.0, 1.0 / 4, 3.0 / 8, 12.0 / 13, 1.0, 1.0 / 2};
  static constexpr double a[6][5] = {
      {},
      {1.0 / 4},
      {3.0 / 32, 9.0 / 32},
      {1932.0 / 2197, -7200.0 / 2197, 7296.0 / 2197},
      {439.0 / 216, -8.0, 3680.0 / 513, -845.0 / 4104},
      {-8.0 / 27, 2.0, -3544.0 / 2565, 1859.0 / 4104, -11.0 / 40}};
  static constexpr double b4[6] = {25.0 / 216, 0.0, 1408.0 / 2565, 2197.0 / 4104, -1.0 / 5, 0.0};
  static constexpr double b5[6] = {16.0 / 135, 0.0, 6656.0 / 12825, 28561.0 / 56430, -9.0 / 50,
                                   2.0 / 55};

  const PotentialSpec& pot = p.potential();
  const double t_end = opt.t_end > opt.t_start ? opt.t_end : traversal_window(p);
  const double window = collision_window_end(p);
  const double dt_max = opt.dt;

  Trajectory tr;
  tr.family = p.family();
  double t = opt.t_start;
  double x = x0;
  const Sample s0 = try_velocity(p, x, t);
  if (s0.vacuum) throw NumericalError("node vacuum at the starting point");
  tr.samples.push_back({t, x});
  tr.max_speed = std::abs(s0.v);

  double dt = dt_max;
  int halvings = 0;
  while (t < t_end) {
    const double h = std::min(dt, t_end - t);
    double k[6];
    bool vacuum = false;
    for (int s = 0; s < 6 && !vacuum; ++s) {
      double xs = x;
      for (int j = 0; j < s; ++j) xs += h * a[s][j] * k[j];
      const Sample v = try_velocity(p, xs, t + c[s] * h);
      vacuum = v.vacuum;
      k[s] = v.v;
    }
    if (vacuum) {
      if (++halvings > 8) {
        tr.diagnostic = "vacuum stall near x = " + std::to_string(x) + " at t = " + std::to_string(t);
        tr.fate = Fate::undecided;
        return tr;
      }
      dt = 0.5 * h;
      continue;
    }
    double x4 = x, x5 = x;
    for (int s = 0; s < 6; ++s) {
      x4 += h * b4[s] * k[s];
      x5 += h * b5[s] * k[s];
    }
    const double err = std::abs(x5 - x4);
    if (err > opt.tolerance && h > 1e-12) {
      dt = h * std::max(0.1, 0.9 * std::pow(opt.tolerance / err, 0.25));
      continue;
    }
    halvings = 0;
    t += h;
    x = x4;
    tr.samples.push_back({t, x});
    tr.max_speed = std::max(tr.max_speed, std::abs(k[0]));
    const double grow = err > 0.0 ? 0.9 * std::pow(opt.tolerance / err, 0.2) : 4.0;
    dt = std::min(dt_max, h * std::clamp(grow, 0.1, 4.0));

    if (t >= window && (x < pot.x_left() || x > pot.x_right())) {
      const double outward = x > pot.midpoint() ? 1.0 : -1.0;
      if (k[0] * outward > 0.0) break;
    }
  }
  tr.fate = classify(pot, x);
  return tr;
}

std::vector<double> sample_starts(const SpectralPacket& p, std::size_t n, std::uint64_t seed,
                                  double t) {
  const double sx = 0.5 / p.params().sigma_k;
  const double x0 = p.params().x0;
  const UniformGrid grid{x0 - 12.0 * sx, x0 + 12.0 * sx, 4001};
  const GridField f = field_at(p, grid, t);
  std::vector<double> cdf(grid.n, 0.0);
  for (std::size_t j = 1; j < grid.n; ++j)
    cdf[j] = cdf[j - 1] + 0.5 * (f.x[j] - f.x[j - 1]) * (std::norm(f.psi[j]) + std::norm(f.psi[j - 1]));
  const double total = cdf.back();
  if (!(total > 0.0)) throw NumericalError("family has no initial density to sample");

  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // 53 random bits, so the draw sequence is fixed across standard libraries.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double target = u * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), grid.n - 1);
    if (j == 0) j = 1;
    const double span = cdf[j] - cdf[j - 1];
    const double frac = span > 0.0 ? (target - cdf[j - 1]) / span : 0.5;
    out.push_back(f.x[j - 1] + frac * (f.x[j] - f.x[j - 1]));
  }
  return out;
}

std::vector<Trajectory> integrate_ensemble(const SpectralPacket& p, const std::vector<double>& starts,
                                           const IntegrationOptions& opt) {
  return parallel_map(starts.size(), [&](std::size_t i) {
    try {
      return integrate(p, starts[i], opt);
    } catch (const NumericalError& e) {
      Trajectory t;
      t.family = p.family();
      t.samples.push_back({opt.t_start, starts[i]});
      t.diagnostic = e.what();
      return t;
    }
  });
}

double critical_point(const SpectralPacket& full, double a, double b, const IntegrationOptions& opt) {
  if (!(a < b)) throw DomainError("critical-point bracket must satisfy a < b");
  const Fate fa = integrate(full, a, opt).fate;
  const Fate fb = integrate(full, b, opt).fate;
  if (fa == fb || fa == Fate::undecided || fb == Fate::undecided)
    throw DomainError("bracket endpoints must have opposite fates; found " +
                      std::string(to_string(fa)) + " and " + std::string(to_string(fb)));
  const double tol = 1e-4 * full.potential().width();
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    const Fate fm = integrate(full, m, opt).fate;
    if (fm == Fate::undecided) throw NumericalError("undecided trajectory during bisection");
    (fm == fa ? a : b) = m;
  }
  return 0.5 * (a + b);
}

}  // namespace tunnelsplit
