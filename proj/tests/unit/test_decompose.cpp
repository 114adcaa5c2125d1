#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tunnelsplit/check.hpp"
#include "tunnelsplit/decompose.hpp"

using namespace tunnelsplit;

TEST_SUITE("decompose") {
  TEST_CASE("rectangular barrier: |1 - alpha|^2 = T") {
    const DecomposedState d = decompose(make_rectangular(2.0, 1.0), 1.0);
    const double T = oracle::rect_T(2.0, 1.0, 1.0);
    CHECK(std::abs(std::norm(1.0 - d.alpha) - T) < 1e-10);
    CHECK(std::abs(d.beta - d.amps.b) < 1e-14);
    CHECK(std::abs(std::abs(d.alpha) - std::abs(d.beta)) < 1e-12);
  }

  TEST_CASE("free potential: nothing to split") {
    const DecomposedState d = decompose(make_rectangular(0.0, 1.0), 2.0);
    CHECK(std::abs(d.amps.b) < 1e-15);
    CHECK(std::abs(d.c) < 1e-15);
    for (double x : {-2.0, 0.0, 0.3, 5.0}) {
      CHECK(std::abs(d.ref.eval(x).psi) < 1e-15);
      CHECK(std::abs(d.tr.eval(x).psi - d.full.eval(x).psi) < 1e-15);
    }
  }

  TEST_CASE("opaque barrier keeps residuals small") {
    const PotentialSpec p = make_rectangular(2.0, 8.0);
    const DecomposedState d = decompose(p, 1.0);
    CHECK(d.amps.R > 0.999);
    CHECK(std::norm(1.0 - d.alpha) < 1e-3);
    CHECK(std::abs(std::norm(1.0 - d.alpha) - oracle::rect_T(2.0, 8.0, 1.0)) < 1e-10);
    const DecompositionResiduals r = measure_decomposition(p, d, 400);
    CHECK(r.sum < 1e-10);
    CHECK(r.oddness < 1e-10);
    CHECK(r.current < 1e-8);
  }

  TEST_CASE("odd reference and midpoint values") {
    const PotentialSpec p = make_rectangular(2.0, 1.0, -1.3);
    const DecomposedState d = decompose(p, 0.7);
    const double xc = p.midpoint();
    CHECK(std::abs(d.ref.eval(xc).psi) == 0.0);
    CHECK(std::abs(d.tr.eval(xc).psi - d.full.eval(xc).psi) < 1e-12);
    for (double s : {0.1, 0.5, 2.0, 7.0}) CHECK(std::abs(d.ref.eval(xc + s).psi + d.ref.eval(xc - s).psi) < 1e-12);
    CHECK(std::abs(d.tr.left_waves().backward) < 1e-12);
  }

  TEST_CASE("truncated pair follows its branches") {
    const PotentialSpec p = make_rectangular(2.0, 1.0);
    const TruncatedPair tp = truncate(decompose(p, 1.0));
    const DecomposedState& d = tp.decomposition();
    CHECK(tp.tilde_ref(1.0).psi == cplx{0.0, 0.0});
    CHECK(tp.tilde_ref(0.0).psi == cplx{0.0, 0.0});
    for (double s : {0.01, 0.3, 3.0}) {
      CHECK(tp.tilde_tr(-s).psi == d.tr.eval(-s).psi);
      CHECK(tp.tilde_tr(s).psi == d.full.eval(s).psi);
      CHECK(tp.tilde_ref(s).psi == cplx{0.0, 0.0});
    }
    const KinkValue at = tp.tilde_tr(0.0);
    CHECK(at.psi == d.full.eval(0.0).psi);
    CHECK(at.dpsi_left == d.tr.eval(0.0).dpsi);
    CHECK(at.dpsi_right == d.full.eval(0.0).dpsi);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const double x = -4.0 + 8.0 * i / 1999.0;
      worst = std::max(worst, std::abs(tp.tilde_tr(x).psi + tp.tilde_ref(x).psi - d.full.eval(x).psi));
    }
    CHECK(worst < 1e-12);
    const auto [jl, jr] = tp.tilde_tr_current_limits();
    CHECK(std::abs(jl - jr) < 1e-10);
  }

  TEST_CASE("uniqueness: perturbing c breaks beta = b") {
    const PotentialSpec p = make_rectangular(2.0, 1.0);
    const DecomposedState d = decompose(p, 1.0);
    const UniquenessReport u = verify_uniqueness(p, 1.0, cplx{0.1, 0.0});
    REQUIRE(u.any_violated);
    CHECK(u.constraints.front().name == "beta_equals_b");
    CHECK(u.constraints.front().violated);
    CHECK(u.constraints.front().residual == doctest::Approx(0.1 * std::abs(d.odd_left.backward)).epsilon(1e-10));
    CHECK_FALSE(verify_uniqueness(p, 1.0, cplx{0.0, 0.0}).any_violated);
    const UniquenessReport tiny = verify_uniqueness(p, 1.0, cplx{1e-14, 0.0});
    CHECK_FALSE(tiny.any_violated);
    CHECK(tiny.indistinguishable_at_tolerance);
  }

  TEST_CASE("c does not depend on how the barrier is cut") {
    const PotentialSpec one = make_rectangular(1.5, 1.0);
    const PotentialSpec three =
        PotentialSpec::from_segments({{-0.5, -0.2, 1.5}, {-0.2, 0.2, 1.5}, {0.2, 0.5, 1.5}});
    for (double E : {0.4, 1.5, 2.7}) CHECK(std::abs(decompose(one, E).c - decompose(three, E).c) < 1e-12);
  }

  TEST_CASE("property: invariants over random barriers, under and over the top") {
    std::mt19937_64 rng(99);
    oracle::SplitMix g(3);
    for (int b = 0; b < 50; ++b) {
      const PotentialSpec p = random_symmetric_barrier(rng);
      for (int e = 0; e < 20; ++e) {
        const double E = g.uniform(0.02, 2.0 * p.max_value());
        const DecompositionResiduals r = measure_decomposition(p, decompose(p, E), 200);
        CHECK(r.sum < 1e-12);
        CHECK(r.midpoint < 1e-12);
        CHECK(r.oddness < 1e-10);
        CHECK(r.current < 1e-10);
        CHECK(r.alpha_T < 1e-10);
        CHECK(r.truncated_sum < 1e-12);
        CHECK(r.tilde_ref_right == 0.0);
        CHECK(r.tilde_tr_current < 1e-10);
      }
    }
  }
}
