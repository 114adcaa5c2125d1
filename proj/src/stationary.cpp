#include "tunnelsplit/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tunnelsplit/error.hpp"

namespace tunnelsplit {
namespace {

constexpr cplx I{0.0, 1.0};

cplx cldexp(cplx z, int n) { return {std::ldexp(z.real(), n), std::ldexp(z.imag(), n)}; }

// Fundamental solutions about the left edge of a Taylor piece:
// psi(s) = c1 * C(s) + c2 * S(s), psi'(s) = -lambda * c1 * S(s) + c2 * C(s).
struct TaylorFns {
  double C;
  double S;
};

TaylorFns taylor_fns(double lambda, double q, double s) {
  const double z = q * s;
  const double z2 = z * z;
  const bool small = std::abs(z) < 1e-4;
  if (lambda > 0.0) {
    return {std::cos(z), small ? s * (1.0 - z2 / 6.0 + z2 * z2 / 120.0) : std::sin(z) / q};
  }
  if (lambda < 0.0) {
    return {std::cosh(z), small ? s * (1.0 + z2 / 6.0 + z2 * z2 / 120.0) : std::sinh(z) / q};
  }
  return {1.0, s};
}

// exp(z) as mantissa * 2^n without overflow for large z.
std::pair<double, int> scaled_exp(double z) {
  if (z <= 300.0) return {std::exp(z), 0};
  const int n = static_cast<int>(std::floor(z / std::numbers::ln2));
  return {std::exp(z - n * std::numbers::ln2), n};
}

}  // namespace

cplx ScaledComplex::value() const { return cldexp(m, e); }

struct StationaryState::Access {
  using Piece = StationaryState::Piece;
  using Basis = StationaryState::Basis;
  using FreeRegion = StationaryState::FreeRegion;

  static void normalize(cplx& c1, cplx& c2, int& exp2) {
    const double m = std::max({std::abs(c1.real()), std::abs(c1.imag()), std::abs(c2.real()),
                               std::abs(c2.imag())});
    if (!(m > 0.0) || !std::isfinite(m)) return;
    const int k = std::ilogb(m);
    c1 = cldexp(c1, -k);
    c2 = cldexp(c2, -k);
    exp2 += k;
  }

  static std::vector<Piece> build_pieces(const PotentialSpec& pot, double E) {
    const double xc = pot.midpoint();
    const double tol = 1e-12 * pot.width();
    std::vector<Piece> pieces;
    auto push = [&](double x0, double x1, double V) {
      Piece p;
      p.x0 = x0;
      p.x1 = x1;
      p.lambda = E - V;
      p.q = std::sqrt(std::abs(p.lambda));
      const double len = x1 - x0;
      if (p.lambda > 0.0 && p.q * len >= 1e-2)
        p.basis = Basis::plane_wave;
      else if (p.lambda < 0.0 && p.q * len > 1.0)
        p.basis = Basis::exponential;
      else
        p.basis = Basis::taylor;
      pieces.push_back(p);
    };
    for (const auto& s : pot.segments()) {
      // Breakpoints within rounding of the midpoint are snapped onto it.
      const double lo = std::abs(s.x_left - xc) <= tol ? xc : s.x_left;
      const double hi = std::abs(s.x_right - xc) <= tol ? xc : s.x_right;
      if (lo < xc && xc < hi) {
        push(lo, xc, s.V);
        push(xc, hi, s.V);
      } else {
        push(lo, hi, s.V);
      }
    }
    return pieces;
  }

  static FieldValue left_edge(const Piece& p) {
    switch (p.basis) {
      case Basis::taylor:
        return {p.c1, p.c2};
      case Basis::plane_wave:
        return {p.c1 + p.c2, I * p.q * (p.c1 - p.c2)};
      case Basis::exponential: {
        const double d = std::exp(-p.q * (p.x1 - p.x0));
        return {p.c1 * d + p.c2, p.q * (p.c1 * d - p.c2)};
      }
    }
    return {};
  }

  static FieldValue right_edge(const Piece& p) {
    const double len = p.x1 - p.x0;
    switch (p.basis) {
      case Basis::taylor: {
        const auto t = taylor_fns(p.lambda, p.q, len);
        return {p.c1 * t.C + p.c2 * t.S, -p.lambda * p.c1 * t.S + p.c2 * t.C};
      }
      case Basis::plane_wave: {
        const cplx e = std::polar(1.0, p.q * len);
        const cplx f = p.c1 * e;
        const cplx g = p.c2 * std::conj(e);
        return {f + g, I * p.q * (f - g)};
      }
      case Basis::exponential: {
        const double d = std::exp(-p.q * len);
        return {p.c1 + p.c2 * d, p.q * (p.c1 - p.c2 * d)};
      }
    }
    return {};
  }

  // Sets the coefficients of p from psi, psi' at its left edge (scale exp2).
  static void from_left(Piece& p, FieldValue f, int exp2) {
    p.exp2 = exp2;
    switch (p.basis) {
      case Basis::taylor:
        p.c1 = f.psi;
        p.c2 = f.dpsi;
        break;
      case Basis::plane_wave:
        p.c1 = 0.5 * (f.psi + f.dpsi / (I * p.q));
        p.c2 = 0.5 * (f.psi - f.dpsi / (I * p.q));
        break;
      case Basis::exponential: {
        const auto [g, n] = scaled_exp(p.q * (p.x1 - p.x0));
        p.c1 = 0.5 * (f.psi + f.dpsi / p.q) * g;
        p.c2 = cldexp(0.5 * (f.psi - f.dpsi / p.q), -n);
        p.exp2 += n;
        break;
      }
    }
    normalize(p.c1, p.c2, p.exp2);
  }

  // Sets the coefficients of p from psi, psi' at its right edge (scale exp2).
  static void from_right(Piece& p, FieldValue f, int exp2) {
    p.exp2 = exp2;
    const double len = p.x1 - p.x0;
    switch (p.basis) {
      case Basis::taylor: {
        const auto t = taylor_fns(p.lambda, p.q, -len);
        p.c1 = f.psi * t.C + f.dpsi * t.S;
        p.c2 = -p.lambda * f.psi * t.S + f.dpsi * t.C;
        break;
      }
      case Basis::plane_wave: {
        const cplx e = std::polar(1.0, p.q * len);
        p.c1 = 0.5 * (f.psi + f.dpsi / (I * p.q)) * std::conj(e);
        p.c2 = 0.5 * (f.psi - f.dpsi / (I * p.q)) * e;
        break;
      }
      case Basis::exponential: {
        const auto [g, n] = scaled_exp(p.q * len);
        p.c1 = cldexp(0.5 * (f.psi + f.dpsi / p.q), -n);
        p.c2 = 0.5 * (f.psi - f.dpsi / p.q) * g;
        p.exp2 += n;
        break;
      }
    }
    normalize(p.c1, p.c2, p.exp2);
  }

  static bool same_plane_waves(const Piece& a, const Piece& b) {
    return a.basis == Basis::plane_wave && b.basis == Basis::plane_wave && a.lambda == b.lambda;
  }

  // Coefficient transfer between adjacent plane-wave pieces of equal height;
  // exact zeros stay exact.
  static void shift_forward(const Piece& from, Piece& to) {
    const cplx e = std::polar(1.0, from.q * (from.x1 - from.x0));
    to.c1 = from.c1 * e;
    to.c2 = from.c2 * std::conj(e);
    to.exp2 = from.exp2;
  }
  static void shift_backward(const Piece& from, Piece& to) {
    const cplx e = std::polar(1.0, to.q * (to.x1 - to.x0));
    to.c1 = from.c1 * std::conj(e);
    to.c2 = from.c2 * e;
    to.exp2 = from.exp2;
  }

  static bool is_free(const Piece& p, double E) {
    return p.basis == Basis::plane_wave && p.lambda == E;
  }

  static FreeRegion free_from_piece(const Piece& p, double k) {
    const cplx e = std::polar(1.0, k * p.x0);
    return {p.c1 * std::conj(e), p.c2 * e, p.exp2};
  }
  static void piece_from_free(Piece& p, const FreeRegion& r, double k) {
    const cplx e = std::polar(1.0, k * p.x0);
    p.c1 = r.forward * e;
    p.c2 = r.backward * std::conj(e);
    p.exp2 = r.exp2;
  }

  static FieldValue free_edge(const FreeRegion& r, double k, double x) {
    const cplx e = std::polar(1.0, k * x);
    const cplx f = r.forward * e;
    const cplx g = r.backward * std::conj(e);
    return {f + g, I * k * (f - g)};
  }
  static FreeRegion free_from_edge(FieldValue f, double k, double x, int exp2) {
    const PlaneWaves w = extract_plane_waves(f, k, x);
    FreeRegion r{w.forward, w.backward, exp2};
    normalize(r.forward, r.backward, r.exp2);
    return r;
  }

  static void require(const PotentialSpec& pot, double E) {
    if (!(E > 0.0) || !std::isfinite(E)) throw DomainError("energy must be positive");
    if (!pot.is_symmetric()) throw DomainError("symmetry violation: potential is not mirror-symmetric");
  }

  static std::pair<StationaryState, ScatteringAmplitudes> full(const PotentialSpec& pot, double E) {
    require(pot, E);
    StationaryState st;
    st.E_ = E;
    st.k_ = std::sqrt(E);
    st.xc_ = pot.midpoint();
    st.pieces_ = build_pieces(pot, E);
    const double k = st.k_;
    auto& P = st.pieces_;
    const std::size_t n = P.size();

    // Outgoing wave only on the right; integrate leftward.
    st.right_ = {cplx{1.0, 0.0}, cplx{0.0, 0.0}, 0};
    for (std::size_t jj = n; jj-- > 0;) {
      Piece& p = P[jj];
      if (jj == n - 1) {
        if (is_free(p, E)) {
          piece_from_free(p, st.right_, k);
        } else {
          from_right(p, free_edge(st.right_, k, p.x1), st.right_.exp2);
        }
      } else {
        const Piece& nx = P[jj + 1];
        if (same_plane_waves(p, nx))
          shift_backward(nx, p);
        else
          from_right(p, left_edge(nx), nx.exp2);
      }
      normalize(p.c1, p.c2, p.exp2);
    }
    if (is_free(P.front(), E)) {
      st.left_ = free_from_piece(P.front(), k);
    } else {
      st.left_ = free_from_edge(left_edge(P.front()), k, P.front().x0, P.front().exp2);
    }

    // Rescale to unit incidence.
    const cplx A = st.left_.forward;
    if (A == cplx{0.0, 0.0} || !std::isfinite(std::abs(A)))
      throw NumericalError("overflow guard tripped: incident amplitude is not representable");
    const cplx f = 1.0 / A;
    const int shift = -st.left_.exp2;
    for (auto& p : P) {
      p.c1 *= f;
      p.c2 *= f;
      p.exp2 += shift;
    }
    st.right_.forward *= f;
    st.right_.backward *= f;
    st.right_.exp2 += shift;
    st.left_.backward *= f;
    st.left_.forward = cplx{1.0, 0.0};
    st.left_.exp2 = 0;

    ScatteringAmplitudes amps;
    amps.a = cldexp(st.right_.forward, st.right_.exp2);
    amps.b = st.left_.backward;
    amps.T = std::norm(amps.a);
    amps.R = std::norm(amps.b);
    return {std::move(st), amps};
  }

  static StationaryState odd(const PotentialSpec& pot, double E) {
    require(pot, E);
    StationaryState st;
    st.E_ = E;
    st.k_ = std::sqrt(E);
    st.xc_ = pot.midpoint();
    st.pieces_ = build_pieces(pot, E);
    const double k = st.k_;
    auto& P = st.pieces_;
    const std::size_t n = P.size();
    std::size_t m = 0;
    while (m < n && P[m].x0 != st.xc_) ++m;
    if (m == 0 || m == n) throw NumericalError("midpoint is not a piece boundary");

    const FieldValue start{cplx{0.0, 0.0}, cplx{1.0, 0.0}};
    for (std::size_t jj = m; jj-- > 0;) {
      Piece& p = P[jj];
      if (jj == m - 1)
        from_right(p, start, 0);
      else if (same_plane_waves(p, P[jj + 1]))
        shift_backward(P[jj + 1], p);
      else
        from_right(p, left_edge(P[jj + 1]), P[jj + 1].exp2);
      normalize(p.c1, p.c2, p.exp2);
    }
    for (std::size_t jj = m; jj < n; ++jj) {
      Piece& p = P[jj];
      if (jj == m)
        from_left(p, start, 0);
      else if (same_plane_waves(P[jj - 1], p))
        shift_forward(P[jj - 1], p);
      else
        from_left(p, right_edge(P[jj - 1]), P[jj - 1].exp2);
      normalize(p.c1, p.c2, p.exp2);
    }
    st.left_ = is_free(P.front(), E)
                   ? free_from_piece(P.front(), k)
                   : free_from_edge(left_edge(P.front()), k, P.front().x0, P.front().exp2);
    st.right_ = is_free(P.back(), E)
                    ? free_from_piece(P.back(), k)
                    : free_from_edge(right_edge(P.back()), k, P.back().x1, P.back().exp2);
    return st;
  }

  static StationaryState combine(ScaledComplex cu, const StationaryState& u, ScaledComplex cv,
                                 const StationaryState& v) {
    if (u.pieces_.size() != v.pieces_.size() || u.E_ != v.E_)
      throw DomainError("combine: states belong to different problems");
    StationaryState out = u;
    auto mix = [&](cplx a1, cplx a2, int ea, cplx b1, cplx b2, int eb, cplx& r1, cplx& r2,
                   int& er) {
      const int sa = ea + cu.e;
      const int sb = eb + cv.e;
      const int s = std::max(sa, sb);
      r1 = cu.m * cldexp(a1, sa - s) + cv.m * cldexp(b1, sb - s);
      r2 = cu.m * cldexp(a2, sa - s) + cv.m * cldexp(b2, sb - s);
      er = s;
      normalize(r1, r2, er);
    };
    for (std::size_t i = 0; i < out.pieces_.size(); ++i) {
      const auto& pu = u.pieces_[i];
      const auto& pv = v.pieces_[i];
      auto& po = out.pieces_[i];
      mix(pu.c1, pu.c2, pu.exp2, pv.c1, pv.c2, pv.exp2, po.c1, po.c2, po.exp2);
    }
    mix(u.left_.forward, u.left_.backward, u.left_.exp2, v.left_.forward, v.left_.backward,
        v.left_.exp2, out.left_.forward, out.left_.backward, out.left_.exp2);
    mix(u.right_.forward, u.right_.backward, u.right_.exp2, v.right_.forward, v.right_.backward,
        v.right_.exp2, out.right_.forward, out.right_.backward, out.right_.exp2);
    return out;
  }
};

FieldValue StationaryState::eval_piece(const Piece& p, double x) const {
  const double s = x - p.x0;
  FieldValue f;
  switch (p.basis) {
    case Basis::taylor: {
      const auto t = taylor_fns(p.lambda, p.q, s);
      f = {p.c1 * t.C + p.c2 * t.S, -p.lambda * p.c1 * t.S + p.c2 * t.C};
      break;
    }
    case Basis::plane_wave: {
      const cplx e = std::polar(1.0, p.q * s);
      const cplx a = p.c1 * e;
      const cplx b = p.c2 * std::conj(e);
      f = {a + b, I * p.q * (a - b)};
      break;
    }
    case Basis::exponential: {
      const double g = std::exp(-p.q * (p.x1 - x));
      const double d = std::exp(-p.q * s);
      f = {p.c1 * g + p.c2 * d, p.q * (p.c1 * g - p.c2 * d)};
      break;
    }
  }
  return {cldexp(f.psi, p.exp2), cldexp(f.dpsi, p.exp2)};
}

FieldValue StationaryState::eval(double x) const {
  if (x < x_left() || x > x_right()) {
    const FreeRegion& r = x < x_left() ? left_ : right_;
    const FieldValue f = Access::free_edge(r, k_, x);
    return {cldexp(f.psi, r.exp2), cldexp(f.dpsi, r.exp2)};
  }
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Piece& p) { return v < p.x0; });
  const Piece& p = it == pieces_.begin() ? pieces_.front() : *std::prev(it);
  return eval_piece(p, x);
}

double StationaryState::current(double x) const {
  const FieldValue f = eval(x);
  return 2.0 * std::imag(std::conj(f.psi) * f.dpsi);
}

PlaneWaves StationaryState::left_waves() const {
  return {cldexp(left_.forward, left_.exp2), cldexp(left_.backward, left_.exp2)};
}

std::pair<PlaneWaves, int> StationaryState::left_waves_scaled() const {
  return {PlaneWaves{left_.forward, left_.backward}, left_.exp2};
}

PlaneWaves StationaryState::right_waves() const {
  return {cldexp(right_.forward, right_.exp2), cldexp(right_.backward, right_.exp2)};
}

std::vector<double> StationaryState::breakpoints() const {
  std::vector<double> out;
  out.reserve(pieces_.size() + 1);
  for (const auto& p : pieces_) out.push_back(p.x0);
  out.push_back(pieces_.back().x1);
  return out;
}

StationaryState StationaryState::scaled(ScaledComplex factor) const {
  return Access::combine(factor, *this, ScaledComplex{cplx{0.0, 0.0}, 0}, *this);
}

StationaryState combine(ScaledComplex cu, const StationaryState& u, ScaledComplex cv,
                        const StationaryState& v) {
  return StationaryState::Access::combine(cu, u, cv, v);
}

std::pair<StationaryState, ScatteringAmplitudes> solve_full(const PotentialSpec& pot, double E) {
  return StationaryState::Access::full(pot, E);
}

StationaryState solve_odd(const PotentialSpec& pot, double E) {
  return StationaryState::Access::odd(pot, E);
}

PlaneWaves extract_plane_waves(const FieldValue& f, double k, double x) {
  const cplx e = std::polar(1.0, k * x);
  const cplx d = f.dpsi / (I * k);
  return {0.5 * (f.psi + d) * std::conj(e), 0.5 * (f.psi - d) * e};
}

}  // namespace tunnelsplit
