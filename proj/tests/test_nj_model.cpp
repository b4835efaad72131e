#include <doctest.h>

#include <cmath>
#include <vector>

#include "deconv/error.hpp"
#include "deconv/nj_model.hpp"
#include "deconv/shape_sim.hpp"

using namespace deconv;

namespace {

ShapeProfile zeros(std::size_t n) { return ShapeProfile(std::vector<double>(n, 0.0)); }

}  // namespace

TEST_CASE("energy") {
  CHECK(nj_energy(PairingMask::parse("xxxxx"), zeros(5), NJParams(3.0)) == -5.0);
  const auto a = PairingMask::parse("xx..");
  CHECK(nj_energy(a, noiseless_profile(a), NJParams(1.0)) == -2.0);
  CHECK(nj_energy(PairingMask::parse("x."), ShapeProfile({1.0, 0.0}), NJParams(2.0)) ==
        doctest::Approx(3.0));
  CHECK_THROWS_AS(nj_energy(a, zeros(3), NJParams(1.0)), InvalidArgument);
  CHECK_THROWS_AS(NJParams(-1.0), InvalidArgument);
}

TEST_CASE("two-structure probabilities") {
  const auto a = PairingMask::parse("x.x.");
  auto [pa, pb] = two_structure_probs(a, a, zeros(4), NJParams(1.0));
  CHECK(pa == 0.5);
  CHECK(pb == 0.5);

  // E_A - E_B = 2Cv - C - 1 for a = "x", b = ".", m = (v); v = 1 gives C - 1.
  const NJParams params(1.0 + kDefaultRT * std::log(9.0));
  auto [qa, qb] = two_structure_probs(PairingMask::parse("x"), PairingMask::parse("."),
                                      ShapeProfile({1.0}), params);
  CHECK(std::abs(qa - 0.1) < 1e-12);
  CHECK(std::abs(qb - 0.9) < 1e-12);
}

TEST_CASE("crossover point") {
  for (double c : {0.1, 1.0, 10.0}) {
    CHECK(crossover_point(PairingMask::parse("xx.."), PairingMask::parse("x.x."),
                          NJParams(c)) == doctest::Approx(0.5));
  }
  const auto a = PairingMask::parse("xxxx..");
  const auto b = PairingMask::parse("....xx");
  CHECK(crossover_point(a, b, NJParams(1.0)) == doctest::Approx(1.0 / 3.0));
  CHECK(crossover_point(PairingMask::parse("..."), PairingMask::parse("xxx"),
                        NJParams(1.0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(crossover_point(a, a, NJParams(1.0)), UndefinedCrossover);
  CHECK_THROWS_AS(crossover_point(a, b, NJParams(0.0)), InvalidArgument);

  const double p = crossover_point(a, b, NJParams(1.0));
  const auto m = mix_profiles(noiseless_profile(a), noiseless_profile(b), p).values;
  auto [pa, pb] = two_structure_probs(a, b, m, NJParams(1.0));
  CHECK(std::abs(pa - 0.5) < 1e-9);
  CHECK(std::abs(pb - 0.5) < 1e-9);
}

TEST_CASE("crossover window") {
  const auto a = PairingMask::parse("xxxx..");
  const auto b = PairingMask::parse("....xx");
  const auto r = crossover_window(a, b, NJParams(1.0, 0.61597));
  CHECK(r.window_bound == doctest::Approx(0.61597 * std::log(9.0) / 6.0));
  CHECK(r.window_bound == doctest::Approx(0.2256).epsilon(1e-3));
  CHECK(r.unclipped.length() == doctest::Approx(r.window_bound));

  const auto tight = crossover_window(a, b, NJParams(1e6));
  CHECK(tight.window_bound < 1e-6);

  // Symmetric pair with a tiny C: the window is clipped to [0, 1].
  const auto wide = crossover_window(PairingMask::parse("x."), PairingMask::parse(".x"),
                                     NJParams(0.01));
  REQUIRE(wide.window.has_value());
  CHECK(wide.window->lo == 0.0);
  CHECK(wide.window->hi == 1.0);
  CHECK(wide.window_bound > 1.0);
}

TEST_CASE("full ensemble") {
  const double rt = kDefaultRT;
  const auto one = full_ensemble(ShapeProfile({0.0}), NJParams(1.0));
  CHECK(one.probabilities[1] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0 / rt))));

  // Direct Boltzmann sum for a length-6 profile.
  const ShapeProfile m({0.3, 0.9, 0.0, 1.2, 0.5, 0.05});
  const NJParams params(0.7);
  const auto e = full_ensemble(m, params);
  double z = 0.0;
  std::vector<double> w(64);
  for (std::uint64_t bits = 0; bits < 64; ++bits) {
    w[bits] = std::exp(-nj_energy(PairingMask::from_bits(bits, 6), m, params) / rt);
    z += w[bits];
  }
  double total = 0.0;
  for (std::uint64_t bits = 0; bits < 64; ++bits) {
    CHECK(e.probabilities[bits] == doctest::Approx(w[bits] / z).epsilon(1e-12));
    total += e.probabilities[bits];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_NOTHROW(full_ensemble(zeros(3), NJParams(0.0)));
  CHECK_THROWS_AS(full_ensemble(zeros(21), NJParams(1.0)), CapExceeded);
  CHECK_THROWS_AS(full_ensemble(zeros(5), NJParams(1.0), 4), CapExceeded);
}

TEST_CASE("tvd sweep") {
  const auto a = PairingMask::parse("xx..x");
  const std::vector<double> grid{0.0, 0.3, 0.5, 1.0};
  for (const auto& pt : tvd_sweep(a, a, NJParams(1.0), grid)) {
    CHECK(pt.p_hat == doctest::Approx(0.5));
    CHECK(pt.tvd == doctest::Approx(std::abs(pt.p - 0.5)));
  }

  // At strong data weight the ensemble follows the dominant mode.
  const auto b = PairingMask::parse("..xx.");
  const auto sweep = tvd_sweep(a, b, NJParams(5.0), grid);
  CHECK(sweep.front().p_hat < 0.05);
  CHECK(sweep.back().p_hat > 0.95);
  for (const auto& pt : sweep) {
    CHECK(pt.p_hat >= 0.0);
    CHECK(pt.p_hat <= 1.0);
  }
}
