#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tunnelsplit/error.hpp"
#include "tunnelsplit/log.hpp"
#include "tunnelsplit/wavepacket.hpp"

using namespace tunnelsplit;

namespace {

const PacketParams kParams{1.0, 0.1, -60.5, 512};
const UniformGrid kWide{-400.0, 400.0, 16001};

}  // namespace

TEST_SUITE("wavepacket") {
  TEST_CASE("free packet: unit norm, centroid and drift") {
    const SpectralPacket p = build_packet(make_rectangular(0.0, 1.0), Family::full, kParams);
    const GridField f0 = field_at(p, kWide, 0.0);
    CHECK(std::abs(norm(f0) - 1.0) < 1e-6);
    const Moments m0 = centroid_and_spread(f0, kWide.x_min, kWide.x_max);
    CHECK(std::abs(m0.mean - kParams.x0) < 1e-6);
    const GridField f1 = field_at(p, kWide, 40.0);
    const Moments m1 = centroid_and_spread(f1, kWide.x_min, kWide.x_max);
    CHECK((m1.mean - m0.mean) / 40.0 == doctest::Approx(2.0 * kParams.k0).epsilon(0.01));
    CHECK(m1.spread > m0.spread);
  }

  TEST_CASE("free packet: tilde_ref vanishes") {
    const SpectralPacket p = build_packet(make_rectangular(0.0, 1.0), Family::tilde_ref, kParams);
    const GridField f = field_at(p, UniformGrid{-200.0, 100.0, 3001}, 10.0);
    for (const cplx& v : f.psi) CHECK(std::abs(v) < 1e-14);
  }

  TEST_CASE("mean transmission matches an independent spectral average") {
    const SpectralPacket p = build_packet(make_rectangular(2.0, 1.0), Family::full, kParams);
    CHECK(std::abs(mean_transmission(p) - oracle::mean_T(2.0, 1.0, 1.0, 0.1)) < 1e-8);
  }

  TEST_CASE("tilde_ref: zero beyond xc, norm equals mean reflection") {
    const PotentialSpec pot = make_rectangular(2.0, 1.0);
    const SpectralPacket p = build_packet(pot, Family::tilde_ref, kParams);
    const double R = 1.0 - oracle::mean_T(2.0, 1.0, 1.0, 0.1);
    for (double t : {0.0, 30.0, 60.0}) {
      const GridField f = field_at(p, kWide, t);
      CHECK(std::abs(norm(f) - R) < 1e-6);
      for (std::size_t i = 0; i < f.x.size(); ++i)
        if (f.x[i] >= pot.midpoint()) CHECK(f.psi[i] == cplx{0.0, 0.0});
      REQUIRE(f.kink);
      const auto [jl, jr] = kink_current_limits(f);
      CHECK(jr == 0.0);
      CHECK(std::abs(current_density(f, pot.midpoint())) == 0.0);
    }
  }

  TEST_CASE("families add up pointwise") {
    const PotentialSpec pot = make_rectangular(2.0, 1.0);
    const SpectralPacket full = build_packet(pot, Family::full, kParams);
    const UniformGrid g{-100.0, 60.0, 1601};
    for (double t : {0.0, 30.0}) {
      const GridField f = field_at(full, g, t);
      const GridField a = field_at(full.with_family(Family::tilde_tr), g, t);
      const GridField b = field_at(full.with_family(Family::tilde_ref), g, t);
      const GridField c = field_at(full.with_family(Family::tr), g, t);
      const GridField d = field_at(full.with_family(Family::ref), g, t);
      for (std::size_t i = 0; i < g.n; ++i) {
        CHECK(std::abs(a.psi[i] + b.psi[i] - f.psi[i]) < 1e-10);
        CHECK(std::abs(c.psi[i] + d.psi[i] - f.psi[i]) < 1e-10);
      }
    }
  }

  TEST_CASE("local current of the incoming packet") {
    const SpectralPacket p = build_packet(make_rectangular(2.0, 1.0), Family::full, kParams);
    const KinkValue v = p.eval(kParams.x0, 0.0);
    const double rho = std::norm(v.psi);
    const double j = 2.0 * std::imag(std::conj(v.psi) * v.dpsi_left);
    CHECK(j == doctest::Approx(2.0 * kParams.k0 * rho).epsilon(0.1));
  }

  TEST_CASE("tilde_tr leaves nothing behind the midpoint") {
    const PotentialSpec pot = make_rectangular(2.0, 1.0);
    const SpectralPacket p = build_packet(pot, Family::tilde_tr, kParams);
    const double t = 1.01 * std::abs(kParams.x0) / p.k_min();
    const GridField f = field_at(p, UniformGrid{-300.0, 400.0, 14001}, t);
    CHECK(mass_in(f, -300.0, pot.midpoint()) < 1e-3);
  }

  TEST_CASE("snapshot window covers the collision") {
    const SpectralPacket p = build_packet(make_rectangular(2.0, 1.0), Family::full, kParams);
    CHECK(traversal_window(p) == doctest::Approx(4.0 * (60.5 + 1.0) / 2.0));
  }

  TEST_CASE("errors") {
    const PotentialSpec pot = make_rectangular(2.0, 1.0);
    CHECK_THROWS_AS(build_packet(pot, Family::full, PacketParams{1.0, 0.3, -60.0, 512}), DomainError);
    CHECK_THROWS_AS(build_packet(pot, Family::full, PacketParams{1.0, 0.1, -60.0, 0}), DomainError);
    CHECK_THROWS_AS(parse_family("sideways"), DomainError);
    const SpectralPacket p = build_packet(pot, Family::full, kParams);
    const GridField f = field_at(p, UniformGrid{-100.0, 0.0, 101}, 0.0);
    CHECK_THROWS_AS(current_density(f, -50.5), DomainError);
    CHECK_THROWS_AS(centroid_and_spread(field_at(p, UniformGrid{300.0, 400.0, 101}, 0.0), 300.0, 400.0),
                    NumericalError);
  }

  TEST_CASE("start too close to the barrier warns") {
    std::string seen;
    const auto old = log::set_sink([&](std::string_view m) { seen = m; });
    build_packet(make_rectangular(2.0, 1.0), Family::full, PacketParams{1.0, 0.1, -10.0, 64});
    log::set_sink(old);
    CHECK(seen.find("6/sigma_k") != std::string::npos);
  }
}
