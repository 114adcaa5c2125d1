#include <doctest.h>

#include <cmath>

#include "tunnelsplit/error.hpp"
#include "tunnelsplit/potential.hpp"

using namespace tunnelsplit;

TEST_SUITE("potential") {
  TEST_CASE("rectangular barrier geometry") {
    const PotentialSpec p = make_rectangular(2.0, 1.0, 0.5);
    CHECK(p.x_left() == 0.0);
    CHECK(p.x_right() == 1.0);
    CHECK(p.midpoint() == 0.5);
    CHECK(p.max_value() == 2.0);
    CHECK(p.value(0.5) == 2.0);
    CHECK(p.value(-0.1) == 0.0);
    CHECK(p.value(1.1) == 0.0);
    CHECK(p.is_symmetric());
    CHECK(p.symmetry_residual() == 0.0);
  }

  TEST_CASE("asymmetric segments are rejected") {
    CHECK_THROWS_AS(PotentialSpec::from_segments({{0.0, 1.0, 1.0}, {1.0, 2.0, 2.0}}), DomainError);
    CHECK_THROWS_AS(PotentialSpec::from_segments({{0.0, 1.0, 1.0}, {1.0, 1.5, 2.0}, {1.5, 2.0, 1.0}}),
                    DomainError);
    CHECK_NOTHROW(PotentialSpec::from_segments({{0.0, 0.5, 1.0}, {0.5, 1.5, 2.0}, {1.5, 2.0, 1.0}}));
  }

  TEST_CASE("gaps and degenerate input are rejected") {
    CHECK_THROWS_AS(PotentialSpec::from_segments({}), DomainError);
    CHECK_THROWS_AS(PotentialSpec::from_segments({{0.0, 1.0, 1.0}, {1.5, 2.5, 1.0}}), DomainError);
    CHECK_THROWS_AS(PotentialSpec::from_segments({{1.0, 1.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(make_rectangular(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(make_rectangular(NAN, 1.0), DomainError);
  }

  TEST_CASE("unchecked spec reports its asymmetry") {
    const PotentialSpec p = PotentialSpec::unchecked({{0.0, 1.0, 1.0}, {1.0, 2.0, 2.0}});
    CHECK_FALSE(p.is_symmetric());
    CHECK(p.symmetry_residual() == doctest::Approx(1.0));
  }

  TEST_CASE("cell average is exact for steps") {
    const PotentialSpec p = make_rectangular(2.0, 1.0);
    CHECK(p.cell_average(-1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.cell_average(-0.25, 0.25) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.cell_average(2.0, 3.0) == 0.0);
  }

  TEST_CASE("sampled gaussian is symmetric with n steps") {
    const PotentialSpec p = sample_symmetric(gaussian_profile(2.0, 1.0, 0.3), -3.7, 4.3, 64);
    CHECK(p.is_symmetric());
    CHECK(p.segments().size() == 64);
    CHECK(p.midpoint() == doctest::Approx(0.3));
    CHECK(p.max_value() <= 2.0);
    CHECK(p.max_value() > 1.9);
  }

  TEST_CASE("shifted raises the support only") {
    const PotentialSpec p = make_rectangular(2.0, 1.0).shifted(0.25);
    CHECK(p.value(0.0) == 2.25);
    CHECK(p.value(0.6) == 0.0);
  }
}
