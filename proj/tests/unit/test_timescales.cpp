#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tunnelsplit/check.hpp"
#include "tunnelsplit/decompose.hpp"
#include "tunnelsplit/error.hpp"
#include "tunnelsplit/log.hpp"
#include "tunnelsplit/timescales.hpp"

using namespace tunnelsplit;

TEST_SUITE("timescales") {
  TEST_CASE("free region: classical traversal") {
    const PotentialSpec free = make_rectangular(0.0, 3.0);
    const double k = std::sqrt(1.7);
    CHECK(dwell_time(free, 1.7, Family::full) == doctest::Approx(3.0 / (2.0 * k)).epsilon(1e-12));
    CHECK(group_delay(free, 1.7) == doctest::Approx(3.0 / (2.0 * k)).epsilon(1e-10));
    const LarmorTimes l = larmor_times(free, 1.7, 1e-4 * 1.7);
    CHECK(l.tau_y == doctest::Approx(3.0 / (2.0 * k)).epsilon(1e-4));
    CHECK(std::abs(l.tau_z) < 1e-3);
  }

  TEST_CASE("dwell time against direct integration of the closed form") {
    const double tau = oracle::simpson(
        [](double x) { return std::norm(oracle::rect_psi_inside(2.0, 1.0, 1.0, x)); }, -0.5, 0.5, 2000);
    CHECK(dwell_time(make_rectangular(2.0, 1.0), 1.0, Family::full) == doctest::Approx(tau / 2.0).epsilon(1e-8));
  }

  TEST_CASE("subensemble dwell times and the interference term") {
    const PotentialSpec p = make_rectangular(2.0, 1.0);
    const DwellBreakdown b = dwell_breakdown(p, 1.0);
    CHECK(std::abs(b.corrected_residual()) < 1e-8);
    // The interference term, integrated independently.
    const DecomposedState d = decompose(p, 1.0);
    const double cross = oracle::simpson(
        [&](double x) { return 2.0 * std::real(std::conj(d.tr.eval(x).psi) * d.ref.eval(x).psi); }, -0.5, 0.0,
        2000);
    CHECK(b.cross == doctest::Approx(cross / 2.0).epsilon(1e-8));
    const double tr = oracle::simpson(
                          [&](double x) { return std::norm(x < 0.0 ? d.tr.eval(x).psi : d.full.eval(x).psi); },
                          -0.5, 0.5, 2000) /
                      (2.0 * b.T);
    CHECK(b.tau_tr == doctest::Approx(tr).epsilon(1e-8));
    CHECK(b.tau_full > 0.0);
    CHECK(b.tau_tr > 0.0);
    CHECK(b.tau_ref > 0.0);
  }

  TEST_CASE("dwell time family and degenerate flux") {
    CHECK_THROWS_AS(dwell_time(make_rectangular(0.0, 1.0), 1.0, Family::tilde_ref), NumericalError);
    CHECK_THROWS_AS(dwell_time(make_rectangular(2.0, 1.0), 1.0, Family::tr), DomainError);
  }

  TEST_CASE("group delay against the closed-form phase") {
    for (double E : {0.3, 1.0, 1.9, 2.5, 6.0}) {
      const double ref = oracle::rect_group_delay(2.0, 1.0, E);
      CHECK(std::abs(group_delay(make_rectangular(2.0, 1.0), E) - ref) < 1e-6);
    }
  }

  TEST_CASE("Hartman saturation and the opaque limit") {
    const double g3 = group_delay(make_rectangular(2.0, 3.0), 1.0);
    const double g5 = group_delay(make_rectangular(2.0, 5.0), 1.0);
    CHECK(g5 / g3 >= 0.95);
    CHECK(g5 / g3 <= 1.05);
    // tau_g -> 1/(k kappa) = 1 for E = 1 below a height-2 barrier.
    CHECK(group_delay(make_rectangular(2.0, 8.0), 1.0) == doctest::Approx(1.0).epsilon(1e-5));
  }

  TEST_CASE("group delay follows the closed form through an over-barrier resonance") {
    const double Eres = 2.0 + M_PI * M_PI;  // q d = pi
    const PotentialSpec p = make_rectangular(2.0, 1.0);
    CHECK(solve_full(p, Eres).second.T == doctest::Approx(1.0).epsilon(1e-12));
    for (double E : {Eres - 3.0, Eres - 1.0, Eres, Eres + 1.0, Eres + 3.0})
      CHECK(std::abs(group_delay(p, E) - oracle::rect_group_delay(2.0, 1.0, E)) < 1e-6);
  }

  TEST_CASE("Larmor clock tends to the dwell time") {
    const PotentialSpec p = make_rectangular(2.0, 1.0);
    const double tau = dwell_time(p, 1.0, Family::full);
    for (double w : {1e-2, 1e-3, 1e-4}) {
      const LarmorTimes l = larmor_times(p, 1.0, w);
      CHECK(std::abs(l.tau_y - tau) / tau < 0.01);
      CHECK(l.tau_z < 0.0);
    }
    CHECK(std::abs(larmor_times(p, 1.0, 1e-4).tau_y - tau) / tau < 1e-6);
    CHECK_THROWS_AS(larmor_times(p, 1.0, 0.0), DomainError);
  }

  TEST_CASE("property: Larmor matches dwell on random barriers") {
    std::mt19937_64 rng(5);
    oracle::SplitMix g(11);
    for (int i = 0; i < 20; ++i) {
      const PotentialSpec p = random_symmetric_barrier(rng);
      const double E = g.uniform(0.1, 2.0) * p.max_value();
      const double tau = dwell_time(p, E, Family::full);
      CHECK(std::abs(larmor_times(p, E, 1e-4 * E).tau_y - tau) / tau < 0.01);
      CHECK(std::abs(dwell_breakdown(p, E).corrected_residual()) < 1e-8);
    }
  }

  TEST_CASE("strong field warns") {
    int warnings = 0;
    const auto old = log::set_sink([&](std::string_view) { ++warnings; });
    larmor_times(make_rectangular(2.0, 1.0), 1.0, 0.1);
    log::set_sink(old);
    CHECK(warnings == 1);
  }

  TEST_CASE("time table") {
    const PotentialSpec p = make_rectangular(2.0, 1.0);
    std::vector<double> E;
    for (int i = 0; i < 200; ++i) E.push_back(0.1 + 3.9 * i / 199.0);
    E.push_back(2.0);
    const auto rows = time_table(p, E, 1e-4);
    REQUIRE(rows.size() == 201);
    for (const auto& r : rows) {
      CHECK_FALSE(r.flagged);
      CHECK(std::isfinite(r.tau_group));
      CHECK(r.tau_dwell_full > 0.0);
      CHECK(r.tau_dwell_tr > 0.0);
      CHECK(r.tau_dwell_ref > 0.0);
    }
    CHECK(time_table(p, std::vector<double>{}, 1e-4).empty());
  }
}
