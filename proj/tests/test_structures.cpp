#include <doctest.h>

#include <cmath>

#include "deconv/error.hpp"
#include "deconv/structures.hpp"

using namespace deconv;

TEST_CASE("mask parsing") {
  const auto m = PairingMask::parse("xx..");
  CHECK(m.size() == 4);
  CHECK(m.paired(0));
  CHECK_FALSE(m.paired(3));
  CHECK(m.paired_count() == 2);
  CHECK(m.to_string() == "xx..");
  CHECK(PairingMask::parse("x.\n") == PairingMask::parse("x."));
  CHECK_THROWS_AS(PairingMask::parse("x(."), ParseError);
  CHECK_THROWS_AS(PairingMask::parse(""), ParseError);
  CHECK(PairingMask::from_bits(0b0101, 4).to_string() == "x.x.");
}

TEST_CASE("pair stats on small masks") {
  const auto a = PairingMask::parse("xx..");
  const auto same = pair_stats(a, a);
  CHECK(same.bp_symdiff == 0);
  CHECK(same.bp_a == 2);
  CHECK(same.bp_b == 2);

  const auto s = pair_stats(a, PairingMask::parse("x.x."));
  CHECK(s.bp_a == 2);
  CHECK(s.bp_b == 2);
  CHECK(s.bp_a_minus_b == 1);
  CHECK(s.bp_b_minus_a == 1);
  CHECK(s.bp_symdiff == 2);
  CHECK(s.agree == 2);

  CHECK_THROWS_AS(pair_stats(a, PairingMask::parse("x.")), InvalidArgument);
}

TEST_CASE("pair stats agree with a per-position recount") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.next() % 60;
    const auto a = random_mask(0.6, n, rng);
    const auto b = random_mask(0.6, n, rng);
    PairStats want;
    want.n = n;
    for (std::size_t i = 0; i < n; ++i) {
      const bool pa = a.to_string()[i] == 'x';
      const bool pb = b.to_string()[i] == 'x';
      want.bp_a += pa;
      want.bp_b += pb;
      want.bp_a_minus_b += pa && !pb;
      want.bp_b_minus_a += pb && !pa;
      want.bp_symdiff += pa != pb;
      want.agree += pa == pb;
    }
    REQUIRE(pair_stats(a, b) == want);
  }
}

TEST_CASE("random masks") {
  const auto all = random_mask(RandomStructureModel(1.0 - 1e-12, 3), 8);
  CHECK(all.paired_count() == 8);
  const auto none = random_mask(RandomStructureModel(1e-12, 3), 8);
  CHECK(none.paired_count() == 0);

  const auto big = random_mask(RandomStructureModel(0.6, 11), 10000);
  const double frac = static_cast<double>(big.paired_count()) / 10000.0;
  CHECK(std::abs(frac - 0.6) <= 3.0 * std::sqrt(0.24 / 10000.0));

  CHECK(random_mask(RandomStructureModel(0.6, 5), 100) ==
        random_mask(RandomStructureModel(0.6, 5), 100));
  CHECK_THROWS_AS(RandomStructureModel(0.0, 1), InvalidArgument);
  CHECK_THROWS_AS(RandomStructureModel(1.0, 1), InvalidArgument);
}

TEST_CASE("noiseless profile") {
  const auto p = noiseless_profile(PairingMask::parse("x."));
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 1.0);
  const auto zeros = noiseless_profile(PairingMask::parse("xxxx"));
  for (double v : zeros.values()) CHECK(v == 0.0);
}

TEST_CASE("f-measure and classification") {
  const auto a = PairingMask::parse("xx..");
  CHECK(f_measure(a, a) == 1.0);
  CHECK(f_measure(PairingMask::parse("..xx"), a) == 0.0);
  CHECK(f_measure(PairingMask::parse("xx.."), PairingMask::parse("x.x.")) ==
        doctest::Approx(0.5));

  const auto b = PairingMask::parse("..xx");
  CHECK(classify(a, a, b) == Closeness::CloserToA);
  CHECK(classify(b, a, b) == Closeness::CloserToB);
  CHECK(classify(PairingMask::parse("x.x."), a, b) == Closeness::Tie);
}

TEST_CASE("classification ties found by enumeration are symmetric") {
  const auto a = PairingMask::parse("xxx..x..");
  const auto b = PairingMask::parse("x..xx.x.");
  int ties = 0;
  for (std::uint64_t bits = 0; bits < 256; ++bits) {
    const auto s = PairingMask::from_bits(bits, 8);
    const auto c = classify(s, a, b);
    if (c == Closeness::Tie) {
      ++ties;
      CHECK(f_measure(s, a) == f_measure(s, b));
    }
    const auto swapped = classify(s, b, a);
    if (c == Closeness::CloserToA) CHECK(swapped == Closeness::CloserToB);
    if (c == Closeness::Tie) CHECK(swapped == Closeness::Tie);
  }
  CHECK(ties > 0);
}
