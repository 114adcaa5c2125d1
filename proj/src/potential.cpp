#include "tunnelsplit/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tunnelsplit/error.hpp"

namespace tunnelsplit {
namespace {

void check_tiling(const std::vector<Segment>& segs) {
  if (segs.empty()) throw DomainError("potential needs at least one segment");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    if (!std::isfinite(s.x_left) || !std::isfinite(s.x_right) || !std::isfinite(s.V))
      throw DomainError("segment " + std::to_string(i) + " has non-finite data");
    if (!(s.x_left < s.x_right))
      throw DomainError("segment " + std::to_string(i) + " has x_left >= x_right");
    if (i > 0 && segs[i - 1].x_right != s.x_left)
      throw DomainError("segments " + std::to_string(i - 1) + " and " + std::to_string(i) +
                        " leave a gap or overlap");
  }
}

bool mirror_symmetric(const std::vector<Segment>& segs, double xc) {
  const double tol = 1e-12 * (segs.back().x_right - segs.front().x_left);
  const std::size_t n = segs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = segs[i];
    const auto& m = segs[n - 1 - i];
    if (s.V != m.V) return false;
    if (std::abs((s.x_left - xc) + (m.x_right - xc)) > tol) return false;
  }
  return true;
}

}  // namespace

PotentialSpec::PotentialSpec(std::vector<Segment> segments, bool symmetric)
    : segments_(std::move(segments)),
      xc_(0.5 * (segments_.front().x_left + segments_.back().x_right)),
      symmetric_(symmetric) {}

PotentialSpec PotentialSpec::from_segments(std::vector<Segment> segments) {
  check_tiling(segments);
  const double xc = 0.5 * (segments.front().x_left + segments.back().x_right);
  if (!mirror_symmetric(segments, xc))
    throw DomainError("potential is not mirror-symmetric about its midpoint");
  return PotentialSpec(std::move(segments), true);
}

PotentialSpec PotentialSpec::unchecked(std::vector<Segment> segments) {
  check_tiling(segments);
  const double xc = 0.5 * (segments.front().x_left + segments.back().x_right);
  const bool sym = mirror_symmetric(segments, xc);
  return PotentialSpec(std::move(segments), sym);
}

double PotentialSpec::max_value() const noexcept {
  double m = 0.0;
  for (const auto& s : segments_) m = std::max(m, s.V);
  return m;
}

double PotentialSpec::value(double x) const noexcept {
  if (x < x_left() || x > x_right()) return 0.0;
  auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                             [](double v, const Segment& s) { return v < s.x_left; });
  if (it == segments_.begin()) return segments_.front().V;
  return std::prev(it)->V;
}

double PotentialSpec::cell_average(double a, double b) const noexcept {
  double acc = 0.0;
  for (const auto& s : segments_) {
    const double lo = std::max(a, s.x_left);
    const double hi = std::min(b, s.x_right);
    if (hi > lo) acc += s.V * (hi - lo);
  }
  return acc / (b - a);
}

double PotentialSpec::symmetry_residual() const noexcept {
  double worst = 0.0;
  auto probe = [&](double x) {
    const double s = x - xc_;
    worst = std::max(worst, std::abs(value(xc_ + s) - value(xc_ - s)));
  };
  for (const auto& seg : segments_) probe(0.5 * (seg.x_left + seg.x_right));
  return worst;
}

PotentialSpec PotentialSpec::shifted(double dV) const {
  auto segs = segments_;
  for (auto& s : segs) s.V += dV;
  return PotentialSpec(std::move(segs), symmetric_);
}

PotentialSpec make_rectangular(double V0, double d, double xc) {
  if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("barrier width must be positive");
  if (!std::isfinite(V0) || !std::isfinite(xc)) throw DomainError("non-finite barrier data");
  return PotentialSpec::from_segments({Segment{xc - 0.5 * d, xc + 0.5 * d, V0}});
}

PotentialSpec sample_symmetric(const std::function<double(double)>& profile, double x_l,
                               double x_r, std::size_t n) {
  if (n == 0) throw DomainError("sample_symmetric needs n >= 1");
  if (!(x_l < x_r)) throw DomainError("sample_symmetric needs x_l < x_r");
  const double xc = 0.5 * (x_l + x_r);
  const double h = (x_r - x_l) / static_cast<double>(n);
  const auto nn = static_cast<long long>(n);
  // Offsets from xc are computed so that offset(n - i) == -offset(i) exactly.
  auto offset = [&](long long i) { return static_cast<double>(2 * i - nn) * h * 0.5; };

  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<long long>(i);
    raw[i] = profile(xc + 0.5 * (offset(ii) + offset(ii + 1)));
  }
  std::vector<Segment> segs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<long long>(i);
    const double v = 0.5 * (raw[i] + raw[n - 1 - i]);
    segs[i] = Segment{xc + offset(ii), xc + offset(ii + 1), v};
  }
  // Mirror pairs must carry bit-identical heights; averaging in a different
  // order could differ in the last bit.
  for (std::size_t i = 0; i < n / 2; ++i) segs[n - 1 - i].V = segs[i].V;
  return PotentialSpec::from_segments(std::move(segs));
}

std::function<double(double)> gaussian_profile(double V0, double width, double xc) {
  if (!(width > 0.0)) throw DomainError("gaussian width must be positive");
  return [=](double x) {
    const double u = (x - xc) / width;
    return V0 * std::exp(-0.5 * u * u);
  };
}

}  // namespace tunnelsplit
