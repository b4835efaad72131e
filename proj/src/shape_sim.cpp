#include "deconv/shape_sim.hpp"

#include <cmath>
#include <vector>

#include "deconv/error.hpp"

namespace deconv {

ReactivityDistribution::ReactivityDistribution(UnpairedExponential e)
    : kind_(Kind::UnpairedExponential), exp_(e) {
  if (!(e.lambda > 0.0) || !std::isfinite(e.lambda)) {
    throw InvalidArgument("exponential: lambda must be positive");
  }
}

ReactivityDistribution::ReactivityDistribution(CenterPairedGEV g)
    : kind_(Kind::CenterPairedGEV), gev_(g) {
  if (!(g.sigma > 0.0) || !std::isfinite(g.sigma)) {
    throw InvalidArgument("GEV: sigma must be positive");
  }
  if (!(g.xi > 0.0) || !std::isfinite(g.xi)) {
    throw InvalidArgument("GEV: xi must be positive");
  }
  if (!std::isfinite(g.mu)) {
    throw InvalidArgument("GEV: mu must be finite");
  }
}

double ReactivityDistribution::support_lower() const {
  return kind_ == Kind::UnpairedExponential ? 0.0 : gev_.support_lower();
}

double ReactivityDistribution::density(double x) const {
  if (!std::isfinite(x)) throw InvalidArgument("density: x must be finite");
  if (kind_ == Kind::UnpairedExponential) {
    return x < 0.0 ? 0.0 : exp_.lambda * std::exp(-exp_.lambda * x);
  }
  const double t = 1.0 + gev_.xi * (x - gev_.mu) / gev_.sigma;
  if (t <= 0.0) return 0.0;
  const double s = std::pow(t, -1.0 / gev_.xi);
  return s / t * std::exp(-s) / gev_.sigma;
}

double ReactivityDistribution::density_derivative(double x) const {
  return density_and_slope(x).slope;
}

ReactivityDistribution::DensityAndSlope
ReactivityDistribution::density_and_slope(double x) const {
  if (kind_ == Kind::UnpairedExponential) {
    if (x < 0.0) return {};
    const double f = exp_.lambda * std::exp(-exp_.lambda * x);
    return {f, -exp_.lambda * f};
  }
  const double t = 1.0 + gev_.xi * (x - gev_.mu) / gev_.sigma;
  if (t <= 0.0) return {};
  const double s = std::pow(t, -1.0 / gev_.xi);
  const double f = s / t * std::exp(-s) / gev_.sigma;
  // d/dx log f = (s - 1 - xi) / (sigma t)
  return {f, f * (s - 1.0 - gev_.xi) / (gev_.sigma * t)};
}

double ReactivityDistribution::cdf(double x) const {
  if (kind_ == Kind::UnpairedExponential) {
    return x <= 0.0 ? 0.0 : -std::expm1(-exp_.lambda * x);
  }
  const double t = 1.0 + gev_.xi * (x - gev_.mu) / gev_.sigma;
  if (t <= 0.0) return 0.0;
  return std::exp(-std::pow(t, -1.0 / gev_.xi));
}

double ReactivityDistribution::survival(double x) const {
  if (kind_ == Kind::UnpairedExponential) {
    return x <= 0.0 ? 1.0 : std::exp(-exp_.lambda * x);
  }
  const double t = 1.0 + gev_.xi * (x - gev_.mu) / gev_.sigma;
  if (t <= 0.0) return 1.0;
  return -std::expm1(-std::pow(t, -1.0 / gev_.xi));
}

double ReactivityDistribution::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw InvalidArgument("quantile: u must lie in (0, 1)");
  }
  if (kind_ == Kind::UnpairedExponential) {
    return -std::log1p(-u) / exp_.lambda;
  }
  return gev_.mu +
         gev_.sigma / gev_.xi * (std::pow(-std::log(u), -gev_.xi) - 1.0);
}

ShapeProfile simulate_profile(const PairingMask& a, Rng& rng,
                              const ReactivityDistribution& unpaired,
                              const ReactivityDistribution& paired) {
  std::vector<double> values(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    values[i] = a.paired(i) ? paired.sample(rng) : unpaired.sample(rng);
  }
  return ShapeProfile(std::move(values));
}

MixtureProfile mix_profiles(const ShapeProfile& s, const ShapeProfile& t,
                            double p) {
  if (s.size() != t.size()) {
    throw InvalidArgument("mix_profiles: profile lengths differ");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("mix_profiles: p must lie in [0, 1]");
  }
  // The weight >= 1/2 is taken as given and the other as its exact
  // complement, so mix(s, t, p) and mix(t, s, 1 - p) agree bit for bit.
  double ws = p;
  double wt = 1.0 - p;
  if (p < 0.5) ws = 1.0 - wt;
  std::vector<double> values(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    values[i] = ws * s[i] + wt * t[i];
  }
  return {p, ShapeProfile(std::move(values))};
}

}  // namespace deconv
