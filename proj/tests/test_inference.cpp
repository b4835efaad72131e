#include <doctest.h>

#include <cmath>
#include <vector>

#include "deconv/error.hpp"
#include "deconv/inference.hpp"
#include "deconv/quadrature.hpp"

using namespace deconv;

namespace {

const ReactivityMixture& model() {
  static const ReactivityMixture m;
  return m;
}

double total_mass(double p) {
  const double lo = model().support_lower(p);
  const double hi = model().upper_truncation(p, 1e-9);
  std::vector<double> inner{lo + 1e-4, lo + 1e-3, lo + 0.01, 0.05, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0};
  const auto edges = panel_edges(lo, hi, inner);
  return integrate_scalar([&](double x) { return model().density(x, p); }, edges, 1e-7)
      .value[0];
}

}  // namespace

TEST_CASE("differing positions") {
  const auto d = DifferingPositions::between(PairingMask::parse("x.x..x"),
                                             PairingMask::parse("..xx.."));
  // k: A unpaired, B paired; l: A paired, B unpaired.
  CHECK(d.k_positions == std::vector<std::size_t>{3});
  CHECK(d.l_positions == std::vector<std::size_t>{0, 5});
  CHECK(d.total() == 3);
}

TEST_CASE("mixture density support and endpoints") {
  for (double p : {0.1, 0.5, 0.9}) {
    CHECK(model().support_lower(p) == doctest::Approx(-0.0250023 * (1 - p)).epsilon(1e-5));
    CHECK(mixture_density(model().support_lower(p) - 1e-6, p) == 0.0);
  }
  CHECK(model().density(0.3, 1.0) == ReactivityDistribution::unpaired().density(0.3));
  CHECK(model().density(0.3, 0.0) == ReactivityDistribution::center_paired().density(0.3));
  CHECK_THROWS_AS(density_dp(0.3, 0.0), InvalidArgument);
  for (double p : {0.05, 0.3, 0.7, 0.95}) {
    for (double x : {-0.02, 0.0, 0.01, 0.2, 1.0, 5.0}) CHECK(mixture_density(x, p) >= 0.0);
  }
}

TEST_CASE("mixture density normalizes") {
  for (double p : {0.2, 0.5, 0.8}) CHECK(total_mass(p) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("mixture density matches sampling") {
  // Fraction of samples below 0.2 against the integrated density.
  const double p = 0.4;
  Rng rng(3);
  const int n = 200000;
  int below = 0;
  for (int i = 0; i < n; ++i) below += model().sample(p, rng) < 0.2;
  const double lo = model().support_lower(p);
  const std::vector<double> edges{lo, lo + 1e-3, 0.0, 0.05, 0.2};
  const double want =
      integrate_scalar([&](double x) { return model().density(x, p); }, edges, 1e-9).value[0];
  const double got = static_cast<double>(below) / n;
  CHECK(std::abs(got - want) <= 3.0 * std::sqrt(want * (1 - want) / n));
}

TEST_CASE("density derivative in p") {
  for (double p : {0.2, 0.5, 0.8}) {
    for (double x : {0.0, 0.05, 0.3, 1.0, 3.0}) {
      const double h = 1e-5;
      const double fd = (mixture_density(x, p + h) - mixture_density(x, p - h)) / (2 * h);
      const double dp = density_dp(x, p);
      CHECK(std::abs(dp - fd) <= 1e-3 * std::max(std::abs(fd), 1e-3));
      const auto both = model().density_and_dp(x, p);
      CHECK(both.density == doctest::Approx(mixture_density(x, p)).epsilon(1e-7));
    }
  }
}

TEST_CASE("fisher information") {
  const auto pt = fisher_information_point(0.5);
  CHECK(pt.information == doctest::Approx(2.15).epsilon(0.05 / 2.15));
  CHECK(pt.achieved_tolerance < 1e-4);
  const std::vector<double> grid{0.05, 0.25, 0.5, 0.75, 0.95};
  const auto curve = fisher_curve(grid);
  REQUIRE(curve.grid.size() == grid.size());
  for (const auto& g : curve.grid) CHECK(g.information > 0.0);
  // Large near both ends, smallest in the interior.
  CHECK(curve.grid[0].information > curve.grid[1].information);
  CHECK(curve.grid[4].information > curve.grid[3].information);
  CHECK_THROWS_AS(fisher_information(1.0), InvalidArgument);
}

TEST_CASE("cramer-rao bound and design rule") {
  const double i5 = fisher_information(0.5);
  const double i3 = fisher_information(0.3);
  const double i7 = fisher_information(0.7);
  CHECK(cramer_rao_bound(10, 0, 0.3) == doctest::Approx(1.0 / (10 * i3)));
  CHECK(cramer_rao_bound(3, 7, i3, i7) == doctest::Approx(cramer_rao_bound(7, 3, i7, i3)));
  CHECK(cramer_rao_bound(20, 27, 0.5) == doctest::Approx(1.0 / (2.15 * 47)).epsilon(0.03));
  CHECK_THROWS_AS(cramer_rao_bound(0, 0, 0.5), InvalidArgument);

  CHECK(min_differences(0.1, 0.5) == 47);
  CHECK(min_differences(1.0, 0.5) == 1);
  CHECK(cramer_rao_bound(47, 0, 0.5) <= 0.01);
  CHECK(cramer_rao_bound(46, 0, 0.5) > 0.01);
  for (double sd : {0.2, 0.05, 0.03}) {
    const double n1 = static_cast<double>(min_differences_for_information(sd, i5));
    const double n2 = static_cast<double>(min_differences_for_information(sd / 2, i5));
    CHECK(std::abs(n2 - 4 * n1) <= 4.0);
  }
}

TEST_CASE("maximum likelihood") {
  const auto a = PairingMask::parse("xx..x.x..xx..x.x.xx.");
  const auto b = PairingMask::parse("..xx.x.xx..xx.x.x..x");
  const auto pos = DifferingPositions::between(a, b);

  CHECK_THROWS_AS(mle_estimate(ShapeProfile(std::vector<double>(20, 0.1)),
                               DifferingPositions::between(a, a)),
                  NoInformativePositions);

  Rng rng(12);
  const auto s = simulate_profile(a, rng);
  const auto t = simulate_profile(b, rng);
  const auto data = mix_profiles(s, t, 0.35).values;
  const auto est = mle_estimate(data, pos);
  CHECK(est.p_hat >= 0.0);
  CHECK(est.p_hat <= 1.0);
  CHECK(est.k == pos.k_positions.size());
  CHECK(est.l == pos.l_positions.size());
  CHECK(est.cr_variance_bound > 0.0);
  CHECK(est.log_likelihood == doctest::Approx(log_likelihood(data.values(), pos, est.p_hat)));
  for (double p : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    CHECK(log_likelihood(data.values(), pos, p) <= est.log_likelihood + 1e-9);
  }

  // Swapping the masks mirrors the estimate.
  const auto swapped = mle_estimate(data, DifferingPositions::between(b, a));
  CHECK(swapped.p_hat == doctest::Approx(1.0 - est.p_hat).epsilon(2e-4));

  // Pure signals land near the ends.
  CHECK(mle_estimate(s, pos).p_hat > 0.8);
  CHECK(mle_estimate(t, pos).p_hat < 0.2);
}

TEST_CASE("recovery experiment") {
  const auto a = PairingMask::parse("xx..x.x..xx..x.x.xx.x..xx.x..x.");
  const auto b = PairingMask::parse("..xx.x.xx..xx.x.x..x.xx..x.xx.x");
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const auto ex = mle_experiment(a, b, grid, 20, 4);
  REQUIRE(ex.rows.size() == 3);
  CHECK(ex.trials.size() == 60);
  CHECK(ex.rows[0].mean_abs_error < ex.rows[1].mean_abs_error);
  CHECK(ex.rows[2].mean_abs_error < ex.rows[1].mean_abs_error);
  const double cr_sd = std::sqrt(cramer_rao_bound(DifferingPositions::between(a, b).total(), 0, 0.5));
  CHECK(ex.rows[1].mean_abs_error <= 2.0 * cr_sd + 0.02);
  const auto again = mle_experiment(a, b, grid, 20, 4);
  CHECK(again.rows[1].mean_abs_error == ex.rows[1].mean_abs_error);
}
