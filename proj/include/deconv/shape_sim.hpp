#pragma once

#include <cstdint>

#include "deconv/profile.hpp"
#include "deconv/random.hpp"
#include "deconv/structures.hpp"

namespace deconv {

/// Fitted reactivity model for unpaired nucleotides: exponential with rate
/// lambda.
struct UnpairedExponential {
  double lambda = 1.46797;
};

/// Fitted reactivity model for center-paired nucleotides: generalized
/// extreme value with shape xi > 0 (heavy right tail), scale sigma and
/// location mu. Support is x >= mu - sigma / xi.
struct CenterPairedGEV {
  double xi = 0.762581;
  double sigma = 0.0492536;
  double mu = 0.0395857;

  double support_lower() const { return mu - sigma / xi; }
};

/// One of the two parametric reactivity models, validated on construction.
class ReactivityDistribution {
 public:
  enum class Kind { UnpairedExponential, CenterPairedGEV };

  ReactivityDistribution(UnpairedExponential e);  // NOLINT(implicit)
  ReactivityDistribution(CenterPairedGEV g);      // NOLINT(implicit)

  static ReactivityDistribution unpaired() { return UnpairedExponential{}; }
  static ReactivityDistribution center_paired() { return CenterPairedGEV{}; }

  Kind kind() const { return kind_; }
  const UnpairedExponential& exponential() const { return exp_; }
  const CenterPairedGEV& gev() const { return gev_; }

  /// Lower edge of the support (0 for the exponential).
  double support_lower() const;

  double density(double x) const;
  /// d density / dx; zero outside the support.
  double density_derivative(double x) const;
  /// density and its derivative from one set of transcendental calls.
  struct DensityAndSlope {
    double density = 0.0;
    double slope = 0.0;
  };
  DensityAndSlope density_and_slope(double x) const;
  double cdf(double x) const;
  /// Inverse CDF on (0, 1).
  double quantile(double u) const;
  /// P(X > x).
  double survival(double x) const;
  double sample(Rng& rng) const { return quantile(rng.uniform_open()); }

 private:
  Kind kind_;
  UnpairedExponential exp_{};
  CenterPairedGEV gev_{};
};

/// Simulated reactivities for mask a: unpaired positions draw from
/// `unpaired`, paired positions from `paired`, in position order from rng.
ShapeProfile simulate_profile(const PairingMask& a, Rng& rng,
                              const ReactivityDistribution& unpaired =
                                  ReactivityDistribution::unpaired(),
                              const ReactivityDistribution& paired =
                                  ReactivityDistribution::center_paired());

struct MixtureProfile {
  double p = 0.0;
  ShapeProfile values;
};

/// Elementwise p s + (1 - p) t.
MixtureProfile mix_profiles(const ShapeProfile& s, const ShapeProfile& t,
                            double p);

}  // namespace deconv
