#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "deconv/error.hpp"
#include "deconv/parallel.hpp"
#include "deconv/profile_io.hpp"
#include "deconv/quadrature.hpp"
#include "deconv/shape_sim.hpp"
#include "oracles.hpp"

using namespace deconv;

TEST_CASE("densities") {
  const auto un = ReactivityDistribution::unpaired();
  const auto gev = ReactivityDistribution::center_paired();
  CHECK(un.density(0.0) == doctest::Approx(1.46797));
  CHECK(un.density(-0.1) == 0.0);
  CHECK(gev.support_lower() == doctest::Approx(-0.0250023).epsilon(1e-5));
  CHECK(gev.density(-0.03) == 0.0);
  CHECK(gev.density(0.05) > 0.0);
  CHECK_THROWS_AS(gev.density(std::nan("")), InvalidArgument);

  // Slopes against central differences.
  for (double x : {0.01, 0.1, 0.5, 2.0}) {
    for (const auto& d : {un, gev}) {
      const double h = 1e-6;
      const double fd = (d.density(x + h) - d.density(x - h)) / (2 * h);
      CHECK(d.density_derivative(x) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("densities integrate to their cdf") {
  for (const auto& d : {ReactivityDistribution::unpaired(),
                        ReactivityDistribution::center_paired()}) {
    const double lo = d.support_lower();
    const std::vector<double> edges{lo, lo + 0.01, 0.1, 1.0, 3.0};
    const auto r = integrate_scalar([&](double x) { return d.density(x); }, edges, 1e-10);
    CHECK(r.converged);
    CHECK(r.value[0] == doctest::Approx(d.cdf(3.0)).epsilon(1e-9));
    CHECK(d.cdf(1.3) + d.survival(1.3) == doctest::Approx(1.0));
  }
}

TEST_CASE("quantiles") {
  const auto un = ReactivityDistribution::unpaired();
  const auto gev = ReactivityDistribution::center_paired();
  CHECK(gev.quantile(std::exp(-1.0)) == doctest::Approx(0.0395857));
  CHECK(un.quantile(0.5) == doctest::Approx(0.47218).epsilon(1e-4));
  for (double u : {1e-6, 0.1, 0.5, 0.9, 0.999}) {
    CHECK(un.cdf(un.quantile(u)) == doctest::Approx(u).epsilon(1e-10));
    CHECK(gev.cdf(gev.quantile(u)) == doctest::Approx(u).epsilon(1e-10));
  }
  CHECK_THROWS_AS(un.quantile(0.0), InvalidArgument);
  CHECK_THROWS_AS(gev.quantile(1.0), InvalidArgument);
  CHECK_THROWS_AS(ReactivityDistribution(UnpairedExponential{-1.0}), InvalidArgument);
  CHECK_THROWS_AS(ReactivityDistribution(CenterPairedGEV{0.5, 0.0, 0.0}), InvalidArgument);
}

TEST_CASE("simulated profiles") {
  const std::size_t n = 100000;
  const auto unpaired = PairingMask(std::vector<Pairing>(n, Pairing::Unpaired));
  Rng rng(5);
  const auto prof = simulate_profile(unpaired, rng);
  double mean = 0.0;
  for (double v : prof.values()) mean += v;
  mean /= static_cast<double>(n);
  const double sd = 1.0 / 1.46797;
  CHECK(std::abs(mean - sd) <= 3.0 * sd / std::sqrt(static_cast<double>(n)));

  const auto paired = PairingMask(std::vector<Pairing>(n, Pairing::Paired));
  Rng rng2(6);
  const auto gp = simulate_profile(paired, rng2);
  const auto gev = ReactivityDistribution::center_paired();
  const double d = testing::ks_statistic({gp.values().begin(), gp.values().end()},
                                         [&](double x) { return gev.cdf(x); });
  CHECK(d < testing::ks_critical_1pct(n));

  const auto mask = PairingMask::parse("x..x.xx.");
  Rng r1(9), r2(9);
  CHECK(simulate_profile(mask, r1) == simulate_profile(mask, r2));
}

TEST_CASE("mixing") {
  const ShapeProfile s({1.0, 0.2, 0.0});
  const ShapeProfile t({0.0, 0.6, 3.0});
  CHECK(mix_profiles(s, t, 1.0).values == s);
  CHECK(mix_profiles(s, t, 0.0).values == t);
  const auto mid = mix_profiles(s, t, 0.5).values;
  CHECK(mid[0] == 0.5);
  CHECK(mid[1] == doctest::Approx(0.4));
  CHECK(mid[2] == 1.5);
  for (double p : {0.1, 0.3, 0.37, 0.5, 0.77}) {
    CHECK(mix_profiles(s, t, p).values == mix_profiles(t, s, 1.0 - p).values);
  }
  CHECK_THROWS_AS(mix_profiles(s, t, 1.5), InvalidArgument);
  CHECK_THROWS_AS(mix_profiles(s, ShapeProfile({1.0}), 0.5), InvalidArgument);
}

TEST_CASE("profile csv") {
  const ShapeProfile p({0.125, 1.0 / 3.0, -0.0125});
  std::ostringstream out;
  write_profile_csv(out, p);
  CHECK(out.str() == "index,reactivity\n0,0.125\n1,0.333333333\n2,-0.0125\n");
  std::istringstream in(out.str());
  const auto back = read_profile_csv(in);
  CHECK(back.size() == 3);
  CHECK(back[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

  std::istringstream bad_header("i,r\n0,1\n");
  CHECK_THROWS_AS(read_profile_csv(bad_header), ParseError);
  std::istringstream bad_index("index,reactivity\n1,0.5\n");
  CHECK_THROWS_AS(read_profile_csv(bad_index), ParseError);
  std::istringstream bad_value("index,reactivity\n0,abc\n");
  CHECK_THROWS_AS(read_profile_csv(bad_value), ParseError);
  CHECK_THROWS_AS(ShapeProfile({1.0, INFINITY}), InvalidArgument);
}

TEST_CASE("random streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  Rng a = Rng::for_task(4, 17);
  Rng b = Rng::for_task(4, 17);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  Rng c(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform_open();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 3) throw InvalidArgument("boom");
                  }),
                  InvalidArgument);
}
