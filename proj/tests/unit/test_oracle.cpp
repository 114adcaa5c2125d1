#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tunnelsplit/error.hpp"
#include "tunnelsplit/log.hpp"
#include "tunnelsplit/oracle.hpp"

using namespace tunnelsplit;

namespace {

GridField gaussian(const UniformGrid& g, double x0, double sigma, double k0) {
  GridField f;
  const double a = std::pow(2.0 * M_PI * sigma * sigma, -0.25);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x = g.at(i);
    f.x.push_back(x);
    f.psi.push_back(a * std::exp(cplx(-(x - x0) * (x - x0) / (4.0 * sigma * sigma), k0 * x)));
  }
  f.dpsi.assign(g.n, cplx{});
  return f;
}

struct Quiet {
  log::Sink old = log::set_sink({});
  ~Quiet() { log::set_sink(old); }
};

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("free Gaussian: drift and spreading") {
    const UniformGrid g{-100.0, 100.0, 4001};
    const PotentialSpec free = make_rectangular(0.0, 1.0);
    const GridField f0 = gaussian(g, -20.0, 5.0, 1.0);
    const double t = 20.0;
    const GridField f = evolve(EvolverConfig{g, 0.005}, free, f0, 4000);
    CHECK(f.t == doctest::Approx(t));
    const Moments m = centroid_and_spread(f, g.x_min, g.x_max);
    CHECK((m.mean + 20.0) / (2.0 * t) == doctest::Approx(1.0).epsilon(0.005));
    CHECK(m.spread == doctest::Approx(5.0 * std::sqrt(1.0 + std::pow(t / 25.0, 2))).epsilon(0.01));
  }

  TEST_CASE("norm is conserved over 1e4 steps") {
    const UniformGrid g{-150.0, 150.0, 6001};
    GridField f0 = gaussian(g, -5.0, 3.0, 1.0);
    const double n0 = norm(f0, 1.0);
    for (auto& v : f0.psi) v /= std::sqrt(n0);
    const GridField f = evolve(EvolverConfig{g, 1e-3}, make_rectangular(2.0, 1.0), f0, 10000);
    CHECK(std::abs(norm(f, 1.0) - 1.0) < 1e-8);
  }

  TEST_CASE("late-time transmitted mass equals the mean transmission") {
    Quiet quiet;
    const PotentialSpec pot = make_rectangular(2.0, 1.0);
    const SpectralPacket p = build_packet(pot, Family::full, PacketParams{1.0, 0.1, -20.0, 512});
    const UniformGrid g{-200.0, 200.0, 16001};
    const GridField f = evolve(EvolverConfig{g, 1e-3}, pot, field_at(p, g, 0.0), 35000);
    CHECK(std::abs(mass_in(f, pot.x_right(), g.x_max) - oracle::mean_T(2.0, 1.0, 1.0, 0.1)) < 1e-3);
  }

  TEST_CASE("compare") {
    Quiet quiet;
    const PotentialSpec pot = make_rectangular(2.0, 1.0);
    const UniformGrid g{-80.0, 40.0, 2401};
    const SpectralPacket p = build_packet(pot, Family::full, PacketParams{1.0, 0.1, -20.0, 256});
    const GridField a = field_at(p, g, 5.0);
    const Distance same = compare(a, a);
    CHECK(same.l2 == 0.0);
    CHECK(same.max_pointwise == 0.0);
    const SpectralPacket q = build_packet(pot, Family::full, PacketParams{1.05, 0.1, -20.0, 256});
    CHECK(compare(a, field_at(q, g, 5.0)).l2 > 1e-2);
    CHECK_THROWS_AS(compare(a, field_at(p, UniformGrid{-80.0, 40.0, 2001}, 5.0)), DomainError);
    CHECK_THROWS_AS(compare(a, field_at(p, g, 6.0)), DomainError);
  }

  TEST_CASE("walls that are too close abort the run") {
    const UniformGrid g{-30.0, 10.0, 801};
    const GridField f0 = gaussian(g, -10.0, 3.0, 1.0);
    CHECK_THROWS_WITH_AS(evolve(EvolverConfig{g, 0.01}, make_rectangular(0.0, 1.0), f0, 3000),
                         doctest::Contains("grid too small"), NumericalError);
  }
}
