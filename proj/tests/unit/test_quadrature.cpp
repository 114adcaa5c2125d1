#include <doctest.h>

#include <cmath>

#include "tunnelsplit/error.hpp"
#include "tunnelsplit/quadrature.hpp"

using namespace tunnelsplit;

TEST_SUITE("quadrature") {
  TEST_CASE("two-point rule") {
    const QuadratureRule r = gauss_legendre(2, -1.0, 1.0);
    CHECK(r.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(r.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(r.weights[0] == doctest::Approx(1.0));
  }

  TEST_CASE("exact for polynomials of degree 2n - 1") {
    for (std::size_t n : {3u, 8u, 17u}) {
      const QuadratureRule r = gauss_legendre(n, 0.5, 2.0);
      const int deg = static_cast<int>(2 * n - 1);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
      const double exact = (std::pow(2.0, deg + 1) - std::pow(0.5, deg + 1)) / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }

  TEST_CASE("512 nodes integrate a gaussian") {
    const QuadratureRule r = gauss_legendre(512, -8.0, 8.0);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::exp(-r.nodes[i] * r.nodes[i]);
    CHECK(s == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
    for (std::size_t i = 1; i < r.nodes.size(); ++i) CHECK(r.nodes[i] > r.nodes[i - 1]);
  }

  TEST_CASE("invalid rules") {
    CHECK_THROWS_AS(gauss_legendre(0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(gauss_legendre(4, 1.0, 1.0), DomainError);
  }
}
