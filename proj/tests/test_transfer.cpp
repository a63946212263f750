#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "tqm/operators.hpp"
#include "tqm/rng.hpp"
#include "tqm/transfer.hpp"
#include "tqm/types.hpp"

using namespace tqm;

namespace {

DecayRates headline_rates() { return {1.0, 1.0, 0.1, 0.1, 0.1}; }

// Short sampling window around the first fidelity peak keeps the
// master-equation runs cheap; the CLI study uses the full three-half-period
// window with the same physics.
TransferScenario short_window() {
  TransferScenario s;
  s.t_final = 0.25;
  s.n_samples = 300;
  return s;
}

std::vector<double> sorted_eigs(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  std::vector<double> v(static_cast<size_t>(es.eigenvalues().size()));
  for (size_t i = 0; i < v.size(); ++i) v[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
  return v;
}

}  // namespace

TEST_CASE("excitation-exchange chain structure") {
  const CompositeSpace sp = build_transfer_space();
  CHECK(sp.total_dim() == 32);
  CHECK(sp.count() == 5);
  CHECK(sp.at(0).label == "sc_qubit");
  CHECK(sp.at(1).label == "microwave");
  CHECK(sp.at(2).label == "mechanical");
  CHECK(sp.at(3).label == "optical");
  CHECK(sp.at(4).label == "atom");
  for (const auto& sub : sp.subsystems()) CHECK(sub.dim == 2);

  SUBCASE("single-excitation sector has five states") {
    int count = 0;
    for (int i = 0; i < sp.total_dim(); ++i)
      if (__builtin_popcount(static_cast<unsigned>(i)) == 1) ++count;
    CHECK(count == 5);
  }

  SUBCASE("labels round-trip through embed") {
    const Matrix n = embed(number_operator(2), {"mechanical"}, sp);
    for (int i = 0; i < sp.total_dim(); ++i) {
      const double expected = (i & 4) != 0 ? 1.0 : 0.0;
      CHECK(n(i, i).real() == expected);
    }
  }

  SUBCASE("coupling graph is the five-site chain") {
    TransferParams p;
    p.g = 1.5;
    p.g_big_1 = 0.7;
    p.g_big_2 = 0.3;
    const HermitianOperator h = build_transfer_hamiltonian(p);
    CHECK(hermiticity_error(h.matrix()) == 0.0);

    const Matrix blk = single_excitation_block(h);
    CHECK(blk.rows() == 5);
    CHECK(blk(0, 1) == cxd{1.5, 0.0});  // sc_qubit <-> microwave
    CHECK(blk(1, 2) == cxd{0.3, 0.0});  // microwave <-> mechanical
    CHECK(blk(2, 3) == cxd{0.7, 0.0});  // mechanical <-> optical
    CHECK(blk(3, 4) == cxd{1.5, 0.0});  // optical <-> atom
    for (int i = 0; i < 5; ++i) CHECK(blk(i, i) == cxd{0.0, 0.0});
    CHECK(blk(0, 2) == cxd{0.0, 0.0});
    CHECK(blk(0, 3) == cxd{0.0, 0.0});
    CHECK(blk(0, 4) == cxd{0.0, 0.0});
    CHECK(blk(1, 3) == cxd{0.0, 0.0});
    CHECK(blk(1, 4) == cxd{0.0, 0.0});
    CHECK(blk(2, 4) == cxd{0.0, 0.0});
  }

  SUBCASE("total excitation is conserved") {
    const HermitianOperator h = build_transfer_hamiltonian(resonance_coupling(1, 2.0));
    const Matrix n = excitation_number(sp);
    CHECK(operator_norm(Matrix(h.matrix() * n - n * h.matrix())) < 1e-14);
  }
}

TEST_CASE("resonance relation fixes the couplings") {
  CHECK(resonance_coupling(1, 1.0).g_big_1 == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
  CHECK(resonance_coupling(2, 1.0).g_big_1 == doctest::Approx(std::sqrt(7.5)).epsilon(1e-14));
  CHECK(resonance_coupling(1, 2.0).g_big_2 == doctest::Approx(2.0 * std::sqrt(1.5)).epsilon(1e-14));

  // strongest order whose coupling ratio approaches the round r = 20 regime
  const TransferParams strong = resonance_coupling(14, 1.0);
  CHECK(strong.r() == doctest::Approx(std::sqrt(391.5)).epsilon(1e-14));
  CHECK(std::abs(strong.r() - 20.0) < 0.25);

  SUBCASE("constructed parameters satisfy their own invariant") {
    for (int k = 1; k <= 20; ++k) CHECK_NOTHROW(resonance_coupling(k, 0.7).validate());
  }

  SUBCASE("contract violations") {
    CHECK_THROWS_AS(resonance_coupling(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(resonance_coupling(1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(resonance_coupling(1, -1.0), std::invalid_argument);

    TransferParams bad = resonance_coupling(1, 1.0);
    bad.g_big_1 = 1.3;
    bad.g_big_2 = 1.3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    TransferParams unequal;
    unequal.g_big_1 = 0.5;
    unequal.g_big_2 = 0.6;
    CHECK_THROWS_AS(unequal.r(), std::invalid_argument);

    TransferParams negative;
    negative.g_big_1 = -0.1;
    CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
  }
}

TEST_CASE("single-excitation spectrum") {
  SUBCASE("first resonance order") {
    const auto eigs = sorted_eigs(single_excitation_block(build_transfer_hamiltonian(resonance_coupling(1, 1.0))));
    const std::vector<double> expected{-2.0, -1.0, 0.0, 1.0, 2.0};
    for (size_t i = 0; i < 5; ++i) CHECK(eigs[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }

  SUBCASE("decoupled mechanical mode") {
    TransferParams p;
    p.g = 1.0;
    const auto eigs = sorted_eigs(single_excitation_block(build_transfer_hamiltonian(p)));
    const std::vector<double> expected{-1.0, -1.0, 0.0, 1.0, 1.0};
    for (size_t i = 0; i < 5; ++i) CHECK(eigs[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }

  SUBCASE("closed form over random couplings") {
    const CounterRng rng{20260813};
    for (int trial = 0; trial < 10; ++trial) {
      const double g = 0.5 + 2.5 * rng.uniform(1, static_cast<std::uint64_t>(trial));
      const double big = 3.0 * rng.uniform(2, static_cast<std::uint64_t>(trial));
      TransferParams p;
      p.g = g;
      p.g_big_1 = big;
      p.g_big_2 = big;
      const auto eigs = sorted_eigs(single_excitation_block(build_transfer_hamiltonian(p)));
      const double top = std::sqrt(g * g + 2.0 * big * big);
      const std::vector<double> expected{-top, -g, 0.0, g, top};
      for (size_t i = 0; i < 5; ++i) CHECK(std::abs(eigs[i] - expected[i]) < 1e-10);
    }
  }
}

TEST_CASE("closed-system mirror transfer") {
  SUBCASE("equator input at the first two resonance orders") {
    CHECK(unitary_transfer(resonance_coupling(1, 1.0), TransferScenario{}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(unitary_transfer(resonance_coupling(2, 1.0), TransferScenario{}) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("random input states transfer exactly") {
    const CounterRng rng{777};
    for (int k : {1, 2}) {
      const TransferParams p = resonance_coupling(k, 1.3);
      for (int trial = 0; trial < 10; ++trial) {
        const auto amps = rng.qubit(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(trial));
        TransferScenario s;
        s.alpha = amps[0];
        s.beta = amps[1];
        CHECK(unitary_transfer(p, s) >= 1.0 - 1e-9);
      }
    }
  }

  SUBCASE("vacuum input is stationary") {
    TransferScenario s;
    s.alpha = 1.0;
    s.beta = 0.0;
    CHECK(unitary_transfer(resonance_coupling(1, 1.0), s) == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("off the resonance relation the mirror fails") {
    TransferParams p;
    p.g = 1.0;
    p.g_big_1 = 1.0;
    p.g_big_2 = 1.0;
    const double f = unitary_transfer(p, TransferScenario{});
    CHECK(f == doctest::Approx(0.972177576967).epsilon(1e-9));
    CHECK(f < 0.99);
  }
}

TEST_CASE("dissipative transfer fidelity curve") {
  const double g = 6.0 * kPi;
  const TransferParams p = resonance_coupling(1, g);

  SUBCASE("headline rates reproduce the high-fidelity peak") {
    const TransferCurve curve = lindblad_transfer(p, headline_rates(), short_window());
    CHECK(curve.points.size() == 300);
    CHECK(curve.peak_f2 == doctest::Approx(0.969528952961).epsilon(1e-9));
    CHECK(curve.peak_f2 > 0.95);
    CHECK(curve.peak_time == doctest::Approx(199.0 * 0.25 / 299.0).epsilon(1e-12));
    // auto step: 0.02 over the top single-excitation frequency plus rates,
    // capped so the RK4 positivity defect stays well inside the validator
    // floor over this window
    const double cap =
        std::pow(2.5e-9 / (0.01 * std::pow(2.0 * g, 5) * (0.25 / 3.0)), 0.25);
    CHECK(curve.dt == doctest::Approx(std::min(0.02 / (2.0 * g + 2.3), cap)).epsilon(1e-12));
    CHECK(curve.dt == doctest::Approx(4.4551918996e-4).epsilon(1e-9));

    CHECK(curve.points.front().f2 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(curve.points.front().excitation == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(curve.points.back().excitation == doctest::Approx(0.415949800261).epsilon(1e-8));
    for (size_t i = 1; i < curve.points.size(); ++i)
      CHECK(curve.points[i].excitation <= curve.points[i - 1].excitation + 1e-12);

    SUBCASE("halving the step leaves the peak unchanged") {
      const TransferCurve half = lindblad_transfer(p, headline_rates(), short_window(), curve.dt / 2.0);
      CHECK(std::abs(half.peak_f2 - curve.peak_f2) < 1e-6);
    }

    SUBCASE("global phase of the input does not matter") {
      TransferScenario rotated = short_window();
      rotated.alpha *= std::polar(1.0, 0.7);
      rotated.beta *= std::polar(1.0, 0.7);
      const TransferCurve other = lindblad_transfer(p, headline_rates(), rotated);
      for (size_t i = 0; i < curve.points.size(); ++i)
        CHECK(std::abs(other.points[i].f2 - curve.points[i].f2) < 1e-12);
    }
  }

  SUBCASE("zero rates reduce to the closed-system mirror") {
    // window chosen so t = pi/g lands exactly on the sampling grid
    TransferScenario s;
    s.t_final = 2.0 * kPi / g;
    s.n_samples = 301;
    const TransferCurve curve = lindblad_transfer(p, DecayRates{}, s);
    CHECK(std::abs(curve.peak_f2 - 1.0) < 1e-9);
    CHECK(curve.peak_time == doctest::Approx(kPi / g).epsilon(1e-12));
  }

  SUBCASE("contract violations") {
    DecayRates negative = headline_rates();
    negative.gamma_a = -0.1;
    CHECK_THROWS_AS(lindblad_transfer(p, negative, short_window()), std::invalid_argument);

    TransferScenario unnormalized = short_window();
    unnormalized.beta = 0.9;
    CHECK_THROWS_AS(lindblad_transfer(p, headline_rates(), unnormalized), std::invalid_argument);

    TransferScenario one_sample = short_window();
    one_sample.n_samples = 1;
    CHECK_THROWS_AS(lindblad_transfer(p, headline_rates(), one_sample), std::invalid_argument);
  }
}

TEST_CASE("coupling mismatch robustness") {
  const TransferParams p = resonance_coupling(1, 6.0 * kPi);
  const auto table = mismatch_sweep(p, headline_rates(), short_window(), {-0.5, -0.1, 0.0, 0.1, 0.5});
  REQUIRE(table.size() == 5);

  CHECK(table[0].peak_f2 == doctest::Approx(0.823672932615).epsilon(1e-9));
  CHECK(table[1].peak_f2 == doctest::Approx(0.964530633397).epsilon(1e-9));
  CHECK(table[2].peak_f2 == doctest::Approx(0.969528952961).epsilon(1e-9));
  CHECK(table[3].peak_f2 == doctest::Approx(0.967852239524).epsilon(1e-9));
  CHECK(table[4].peak_f2 == doctest::Approx(0.931834244417).epsilon(1e-9));

  // ten percent mismatch stays above 0.94; half mismatch degrades further
  CHECK(table[1].peak_f2 > 0.94);
  CHECK(table[3].peak_f2 > 0.94);
  CHECK(table[0].peak_f2 < table[1].peak_f2);
  CHECK(table[1].peak_f2 < table[2].peak_f2);
  CHECK(table[4].peak_f2 < table[3].peak_f2);
  CHECK(table[3].peak_f2 < table[2].peak_f2);

  SUBCASE("zero fraction reproduces the unperturbed run") {
    const TransferCurve fresh = lindblad_transfer(p, headline_rates(), short_window());
    CHECK(table[2].peak_f2 == fresh.peak_f2);
  }

  SUBCASE("fractions beyond half are rejected") {
    CHECK_THROWS_AS(mismatch_sweep(p, headline_rates(), short_window(), {0.6}), std::invalid_argument);
  }
}

TEST_CASE("mechanical-decay sensitivity falls with coupling order") {
  const double g = 6.0 * kPi;
  const auto table = large_r_study(g, {1, 2}, headline_rates(), short_window());
  REQUIRE(table.size() == 2);

  CHECK(table[0].r == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
  CHECK(table[1].r == doctest::Approx(std::sqrt(7.5)).epsilon(1e-14));
  CHECK(table[0].peak_f2 == doctest::Approx(0.969528952961).epsilon(1e-9));
  CHECK(table[0].peak_f2_no_mech_decay == doctest::Approx(0.970655944367).epsilon(1e-9));
  CHECK(table[0].gap == doctest::Approx(1.12699141e-3).epsilon(1e-5));
  CHECK(table[1].peak_f2 == doctest::Approx(0.972860579615).epsilon(1e-9));
  CHECK(table[1].peak_f2_no_mech_decay == doctest::Approx(0.973212544872).epsilon(1e-9));
  CHECK(table[1].gap == doctest::Approx(3.51965257e-4).epsilon(1e-5));

  // stronger beam-splitter coupling spends less time on the lossy mode
  CHECK(table[1].gap < table[0].gap);
  CHECK(table[0].gap >= 0.0);
  CHECK(table[1].gap >= 0.0);

  SUBCASE("without mechanical decay the control gap vanishes") {
    DecayRates quiet = headline_rates();
    quiet.kappa_d = 0.0;
    const auto control = large_r_study(g, {1}, quiet, short_window());
    CHECK(control.front().gap == 0.0);
  }

  SUBCASE("empty order list is rejected") {
    CHECK_THROWS_AS(large_r_study(g, {}, headline_rates(), short_window()), std::invalid_argument);
  }
}
