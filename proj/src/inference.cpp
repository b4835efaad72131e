#include "deconv/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "deconv/error.hpp"
#include "deconv/parallel.hpp"
#include "deconv/quadrature.hpp"

namespace deconv {

namespace {

constexpr double kDensityFloor = 1e-300;
constexpr double kGridStep = 0.01;
constexpr double kGoldenWidth = 1e-4;

// GEV quantile levels used to place inner breakpoints around the narrow
// paired peak and along its heavy tail.
constexpr double kPairedLevels[] = {1e-6, 1e-3, 0.02, 0.1, 0.25, 0.4, 0.55,
                                    0.7,  0.85, 0.95, 0.99, 0.999};
// Exponential quantile levels for the unpaired factor.
constexpr double kUnpairedLevels[] = {0.2, 0.5, 0.8, 0.95, 0.99, 0.9999, 1 - 1e-8};

void check_open_p(double p, const char* op) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidArgument(std::string(op) + ": p must lie in (0, 1)");
  }
}

void check_closed_p(double p, const char* op) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument(std::string(op) + ": p must lie in [0, 1]");
  }
}

double safe_log(double g) {
  return g > 0.0 ? std::log(g) : -std::numeric_limits<double>::infinity();
}

}  // namespace

DifferingPositions DifferingPositions::between(const PairingMask& a,
                                               const PairingMask& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("DifferingPositions: mask lengths differ");
  }
  DifferingPositions d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a.paired(i) && b.paired(i)) d.k_positions.push_back(i);
    if (a.paired(i) && !b.paired(i)) d.l_positions.push_back(i);
  }
  return d;
}

ReactivityMixture::ReactivityMixture(ReactivityDistribution unpaired,
                                     ReactivityDistribution paired,
                                     double inner_rel_tol)
    : unpaired_(unpaired), paired_(paired), inner_rel_tol_(inner_rel_tol) {
  if (!(inner_rel_tol > 0.0)) {
    throw InvalidArgument("ReactivityMixture: tolerance must be positive");
  }
}

double ReactivityMixture::support_lower(double p) const {
  check_closed_p(p, "support_lower");
  return p * unpaired_.support_lower() + (1.0 - p) * paired_.support_lower();
}

std::vector<double> ReactivityMixture::inner_breakpoints(double x, double p) const {
  std::vector<double> pts;
  pts.reserve(std::size(kPairedLevels) + std::size(kUnpairedLevels) + 1);
  for (double u : kPairedLevels) pts.push_back(x - (1.0 - p) * paired_.quantile(u));
  for (double u : kUnpairedLevels) pts.push_back(p * unpaired_.quantile(u));
  return pts;
}

double ReactivityMixture::density(double x, double p) const {
  check_closed_p(p, "mixture_density");
  if (!std::isfinite(x)) throw InvalidArgument("mixture_density: x must be finite");
  if (p == 0.0) return paired_.density(x);
  if (p == 1.0) return unpaired_.density(x);

  const double lower = p * unpaired_.support_lower();
  const double upper = x - (1.0 - p) * paired_.support_lower();
  if (upper <= lower) return 0.0;

  const double q = 1.0 - p;
  auto integrand = [&](double y) {
    return unpaired_.density(y / p) * paired_.density((x - y) / q);
  };
  const auto edges = panel_edges(lower, upper, inner_breakpoints(x, p));
  const auto r = integrate_scalar(integrand, edges, inner_rel_tol_);
  return std::max(0.0, r.value[0] / (p * q));
}

ReactivityMixture::DensityAndDp ReactivityMixture::density_and_dp(double x,
                                                                  double p) const {
  check_open_p(p, "density_dp");
  if (!std::isfinite(x)) throw InvalidArgument("density_dp: x must be finite");

  const double lower = p * unpaired_.support_lower();
  const double upper = x - (1.0 - p) * paired_.support_lower();
  if (upper <= lower) return {};

  const double q = 1.0 - p;
  const auto edges = panel_edges(lower, upper, inner_breakpoints(x, p));

  // g = K(p) J0 with K = 1/(p q) and J0 = int f_un(y/p) f_pair((x-y)/q) dy.
  //   J1 = int f_un'(y/p) (-y/p^2) f_pair((x-y)/q) dy
  //   J2 = int f_un(y/p) f_pair'((x-y)/q) (x-y)/q^2 dy
  // dg/dp = K'(p) J0 + K(p) (J1 + J2).
  auto integrand = [&](double y) {
    const auto un = unpaired_.density_and_slope(y / p);
    const auto pr = paired_.density_and_slope((x - y) / q);
    return std::array<double, 3>{
        un.density * pr.density,
        un.slope * (-y / (p * p)) * pr.density,
        un.density * pr.slope * (x - y) / (q * q),
    };
  };
  const auto r = integrate_adaptive<3>(integrand, edges, inner_rel_tol_);

  const double k = 1.0 / (p * q);
  const double dk = -(1.0 - 2.0 * p) / (p * q * p * q);
  return {std::max(0.0, k * r.value[0]),
          dk * r.value[0] + k * (r.value[1] + r.value[2])};
}

double ReactivityMixture::density_dp(double x, double p) const {
  return density_and_dp(x, p).dp;
}

double ReactivityMixture::upper_truncation(double p, double tail_mass) const {
  check_closed_p(p, "upper_truncation");
  auto tail_bound = [&](double x) {
    double t = 0.0;
    if (p > 0.0) t += unpaired_.survival(x / (2.0 * p));
    if (p < 1.0) t += paired_.survival(x / (2.0 * (1.0 - p)));
    return t;
  };
  double hi = 1.0;
  while (tail_bound(hi) > tail_mass) {
    hi *= 2.0;
    if (hi > 1e300) throw InvalidArgument("upper_truncation: tail too heavy");
  }
  double lo = hi / 2.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tail_bound(mid) > tail_mass ? lo : hi) = mid;
  }
  return hi;
}

double ReactivityMixture::sample(double p, Rng& rng) const {
  check_closed_p(p, "sample");
  const double u = unpaired_.sample(rng);
  const double v = paired_.sample(rng);
  return p * u + (1.0 - p) * v;
}

double mixture_density(double x, double p, const ReactivityMixture& model) {
  return model.density(x, p);
}

double density_dp(double x, double p, const ReactivityMixture& model) {
  return model.density_dp(x, p);
}

FisherPoint fisher_information_point(double p, const ReactivityMixture& model,
                                     const FisherOptions& options) {
  check_open_p(p, "fisher_information");
  const double lo = model.support_lower(p);
  const double hi = model.upper_truncation(p, options.tail_mass);

  // Dense panels near the support edge where g rises steeply, then
  // geometrically growing panels out to the truncation point.
  std::vector<double> interior;
  const double q = 1.0 - p;
  for (double u : kPairedLevels) interior.push_back(q * model.paired().quantile(u));
  for (double u : kUnpairedLevels) interior.push_back(p * model.unpaired().quantile(u));
  for (double step = 1e-4; lo + step < hi; step *= 2.0) interior.push_back(lo + step);

  auto integrand = [&](double x) {
    const auto [g, dg] = model.density_and_dp(x, p);
    if (g <= kDensityFloor) return 0.0;
    return dg * dg / g;
  };
  const auto edges = panel_edges(lo, hi, std::move(interior));
  const auto r = integrate_scalar(integrand, edges, options.outer_rel_tol);

  FisherPoint out{p, r.value[0], r.relative_error()};
  if (!r.converged || !(out.achieved_tolerance <= options.max_achieved_tolerance) ||
      !std::isfinite(out.information)) {
    throw QuadratureError("fisher_information: outer quadrature did not converge "
                          "(achieved relative error " +
                              std::to_string(out.achieved_tolerance) + ")",
                          out.achieved_tolerance);
  }
  return out;
}

double fisher_information(double p, const ReactivityMixture& model) {
  return fisher_information_point(p, model).information;
}

FisherResult fisher_curve(std::span<const double> p_grid,
                          const ReactivityMixture& model,
                          const FisherOptions& options) {
  FisherResult out;
  out.quadrature_tolerance = options.outer_rel_tol;
  out.grid.resize(p_grid.size());
  parallel_for(p_grid.size(), [&](std::size_t i) {
    out.grid[i] = fisher_information_point(p_grid[i], model, options);
  });
  return out;
}

double cramer_rao_bound(std::size_t k, std::size_t l, double info_p,
                        double info_one_minus_p) {
  if (k + l == 0) {
    throw InvalidArgument("cramer_rao_bound: need at least one differing position");
  }
  return 1.0 / (static_cast<double>(k) * info_p +
                static_cast<double>(l) * info_one_minus_p);
}

double cramer_rao_bound(std::size_t k, std::size_t l, double p,
                        const ReactivityMixture& model) {
  if (k + l == 0) {
    throw InvalidArgument("cramer_rao_bound: need at least one differing position");
  }
  check_open_p(p, "cramer_rao_bound");
  const double info_p = k > 0 ? fisher_information(p, model) : 0.0;
  double info_q = 0.0;
  if (l > 0) info_q = (k > 0 && p == 0.5) ? info_p : fisher_information(1.0 - p, model);
  return cramer_rao_bound(k, l, info_p, info_q);
}

std::size_t min_differences_for_information(double target_sd,
                                            double information) {
  if (!(target_sd > 0.0)) {
    throw InvalidArgument("min_differences: target standard deviation must be positive");
  }
  if (!(information > 0.0)) {
    throw InvalidArgument("min_differences: information must be positive");
  }
  auto sd = [&](std::size_t n) {
    return 1.0 / std::sqrt(static_cast<double>(n) * information);
  };
  auto n = static_cast<std::size_t>(
      std::max(1.0, std::ceil(1.0 / (target_sd * target_sd * information))));
  while (n > 1 && sd(n - 1) <= target_sd) --n;
  while (sd(n) > target_sd) ++n;
  return n;
}

std::size_t min_differences(double target_sd, double p,
                            const ReactivityMixture& model) {
  return min_differences_for_information(target_sd, fisher_information(p, model));
}

double log_likelihood(std::span<const double> data,
                      const DifferingPositions& positions, double p,
                      const ReactivityMixture& model) {
  if (positions.total() == 0) {
    throw NoInformativePositions("no informative positions: masks never differ");
  }
  check_closed_p(p, "log_likelihood");
  const double q = 1.0 - p;
  double total = 0.0;
  for (std::size_t i : positions.k_positions) {
    if (i >= data.size()) throw InvalidArgument("log_likelihood: position beyond data");
    total += safe_log(model.density(data[i], p));
  }
  for (std::size_t i : positions.l_positions) {
    if (i >= data.size()) throw InvalidArgument("log_likelihood: position beyond data");
    total += safe_log(model.density(data[i], q));
  }
  return total;
}

namespace {

struct Maximum {
  double p = 0.0;
  double log_likelihood = 0.0;
};

Maximum maximize_likelihood(const ShapeProfile& data,
                            const DifferingPositions& positions,
                            const ReactivityMixture& model) {
  if (positions.total() == 0) {
    throw NoInformativePositions("no informative positions: masks never differ");
  }
  auto ll = [&](double p) {
    return log_likelihood(data.values(), positions, p, model);
  };

  const auto steps = static_cast<std::size_t>(std::lround(1.0 / kGridStep));
  double best_p = 0.0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= steps; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(steps);
    const double v = ll(p);
    if (v > best_ll) {
      best_ll = v;
      best_p = p;
    }
  }

  // Golden-section search on the bracket around the best grid point.
  double a = std::max(0.0, best_p - kGridStep);
  double b = std::min(1.0, best_p + kGridStep);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = ll(c);
  double fd = ll(d);
  while (b - a > kGoldenWidth) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = ll(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = ll(d);
    }
  }
  const double refined = 0.5 * (a + b);
  const double refined_ll = ll(refined);
  if (refined_ll > best_ll) {
    best_p = refined;
    best_ll = refined_ll;
  }
  return {best_p, best_ll};
}

}  // namespace

EstimateResult mle_estimate(const ShapeProfile& data,
                            const DifferingPositions& positions,
                            const ReactivityMixture& model) {
  const Maximum best = maximize_likelihood(data, positions, model);
  EstimateResult out;
  out.p_hat = best.p;
  out.log_likelihood = best.log_likelihood;
  out.k = positions.k_positions.size();
  out.l = positions.l_positions.size();
  out.cr_variance_bound =
      cramer_rao_bound(out.k, out.l, std::clamp(best.p, 0.01, 0.99), model);
  return out;
}

double MleExperiment::max_abs_error() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.max_abs_error);
  return m;
}

MleExperiment mle_experiment(const PairingMask& a, const PairingMask& b,
                             std::span<const double> p_grid, std::size_t trials,
                             std::uint64_t seed, const ReactivityMixture& model) {
  const DifferingPositions positions = DifferingPositions::between(a, b);
  if (positions.total() == 0) {
    throw NoInformativePositions("no informative positions: masks never differ");
  }
  if (trials == 0) throw InvalidArgument("mle_experiment: trials must be >= 1");
  for (double p : p_grid) check_closed_p(p, "mle_experiment");

  MleExperiment out;
  out.trials.resize(p_grid.size() * trials);
  parallel_for(out.trials.size(), [&](std::size_t cell) {
    const std::size_t gi = cell / trials;
    const double p = p_grid[gi];
    Rng rng = Rng::for_task(seed, cell);
    const ShapeProfile s = simulate_profile(a, rng, model.unpaired(), model.paired());
    const ShapeProfile t = simulate_profile(b, rng, model.unpaired(), model.paired());
    const MixtureProfile m = mix_profiles(s, t, p);
    const Maximum est = maximize_likelihood(m.values, positions, model);
    out.trials[cell] = {p, cell % trials, est.p, std::abs(est.p - p)};
  });

  out.rows.reserve(p_grid.size());
  for (std::size_t gi = 0; gi < p_grid.size(); ++gi) {
    MleRow row{p_grid[gi], 0.0, 0.0};
    for (std::size_t t = 0; t < trials; ++t) {
      const double e = out.trials[gi * trials + t].abs_error;
      row.mean_abs_error += e;
      row.max_abs_error = std::max(row.max_abs_error, e);
    }
    row.mean_abs_error /= static_cast<double>(trials);
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace deconv
