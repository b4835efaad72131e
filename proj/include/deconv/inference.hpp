#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "deconv/profile.hpp"
#include "deconv/shape_sim.hpp"
#include "deconv/structures.hpp"

namespace deconv {

/// Positions where two masks disagree, split by which mask is unpaired.
struct DifferingPositions {
  /// a unpaired, b paired: the reactivity there has density g(x, p).
  std::vector<std::size_t> k_positions;
  /// a paired, b unpaired: density g(x, 1 - p).
  std::vector<std::size_t> l_positions;

  static DifferingPositions between(const PairingMask& a, const PairingMask& b);

  std::size_t total() const { return k_positions.size() + l_positions.size(); }
};

/// Density of X = p U + (1 - p) V with U unpaired and V center-paired
/// reactivities. For 0 < p < 1 this is the convolution
///   g(x, p) = 1/(p(1-p)) int_0^{x - (1-p) v0} f_un(y/p) f_pair((x-y)/(1-p)) dy
/// where v0 < 0 is the lower edge of the paired support; at p = 0 and p = 1
/// it is the pure paired or unpaired density.
class ReactivityMixture {
 public:
  ReactivityMixture(ReactivityDistribution unpaired = ReactivityDistribution::unpaired(),
                    ReactivityDistribution paired = ReactivityDistribution::center_paired(),
                    double inner_rel_tol = 1e-8);

  const ReactivityDistribution& unpaired() const { return unpaired_; }
  const ReactivityDistribution& paired() const { return paired_; }

  /// Smallest x with g(x, p) > 0.
  double support_lower(double p) const;

  double density(double x, double p) const;

  /// dg/dp for 0 < p < 1, as the derivative of the 1/(p(1-p)) prefactor
  /// times the convolution integral plus the two product-rule integrals.
  /// The boundary term at the upper limit vanishes because f_pair is zero at
  /// the edge of its support.
  double density_dp(double x, double p) const;

  struct DensityAndDp {
    double density = 0.0;
    double dp = 0.0;
  };
  /// g and dg/dp from a single shared quadrature pass.
  DensityAndDp density_and_dp(double x, double p) const;

  /// Point beyond which g(., p) holds less than tail_mass, from
  /// P(X > x) <= P(pU > x/2) + P((1-p)V > x/2).
  double upper_truncation(double p, double tail_mass) const;

  /// Draws X = p U + (1 - p) V.
  double sample(double p, Rng& rng) const;

 private:
  std::vector<double> inner_breakpoints(double x, double p) const;

  ReactivityDistribution unpaired_;
  ReactivityDistribution paired_;
  double inner_rel_tol_;
};

struct FisherPoint {
  double p = 0.0;
  double information = 0.0;
  /// Relative error estimate of the outer integral.
  double achieved_tolerance = 0.0;
};

struct FisherResult {
  std::vector<FisherPoint> grid;
  double quadrature_tolerance = 0.0;
};

struct FisherOptions {
  double outer_rel_tol = 1e-6;
  double tail_mass = 1e-8;
  /// Convergence failure is reported when the achieved relative error
  /// exceeds this.
  double max_achieved_tolerance = 1e-4;
};

double mixture_density(double x, double p,
                       const ReactivityMixture& model = ReactivityMixture{});
double density_dp(double x, double p,
                  const ReactivityMixture& model = ReactivityMixture{});

/// I(p) = int (d/dp log g)^2 g dx, integrated from the support edge to the
/// point where the tail mass of g drops below options.tail_mass. Throws
/// QuadratureError when the outer integral does not converge.
FisherPoint fisher_information_point(double p,
                                     const ReactivityMixture& model = ReactivityMixture{},
                                     const FisherOptions& options = {});
double fisher_information(double p,
                          const ReactivityMixture& model = ReactivityMixture{});
FisherResult fisher_curve(std::span<const double> p_grid,
                          const ReactivityMixture& model = ReactivityMixture{},
                          const FisherOptions& options = {});

/// 1 / (k I(p) + l I(1 - p)).
double cramer_rao_bound(std::size_t k, std::size_t l, double p,
                        const ReactivityMixture& model = ReactivityMixture{});
/// Same bound with I(p) and I(1 - p) already known.
double cramer_rao_bound(std::size_t k, std::size_t l, double info_p,
                        double info_one_minus_p);

/// Smallest n with 1 / sqrt(n I(p)) <= target_sd.
std::size_t min_differences(double target_sd, double p,
                            const ReactivityMixture& model = ReactivityMixture{});
std::size_t min_differences_for_information(double target_sd, double information);

struct EstimateResult {
  double p_hat = 0.0;
  double log_likelihood = 0.0;
  double cr_variance_bound = 0.0;
  std::size_t k = 0;
  std::size_t l = 0;
};

/// log L(p) = sum_{i in k} log g(x_i, p) + sum_{i in l} log g(x_i, 1 - p).
double log_likelihood(std::span<const double> data,
                      const DifferingPositions& positions, double p,
                      const ReactivityMixture& model = ReactivityMixture{});

/// Maximizes log_likelihood over [0, 1]: grid at step 0.01, then
/// golden-section refinement to width 1e-4 around the best grid point.
/// cr_variance_bound is evaluated at p_hat clamped to [0.01, 0.99] since the
/// information diverges at the endpoints.
EstimateResult mle_estimate(const ShapeProfile& data,
                            const DifferingPositions& positions,
                            const ReactivityMixture& model = ReactivityMixture{});

struct MleTrial {
  double p = 0.0;
  std::size_t trial = 0;
  double p_hat = 0.0;
  double abs_error = 0.0;
};

struct MleRow {
  double p = 0.0;
  double mean_abs_error = 0.0;
  double max_abs_error = 0.0;
};

struct MleExperiment {
  std::vector<MleTrial> trials;
  std::vector<MleRow> rows;

  double max_abs_error() const;
};

/// For each grid value and trial, simulate S from a and T from b with the
/// stream Rng::for_task(seed, cell) where cell = grid_index * trials + trial,
/// mix at p, and estimate p from the differing positions.
MleExperiment mle_experiment(const PairingMask& a, const PairingMask& b,
                             std::span<const double> p_grid, std::size_t trials,
                             std::uint64_t seed,
                             const ReactivityMixture& model = ReactivityMixture{});

}  // namespace deconv
