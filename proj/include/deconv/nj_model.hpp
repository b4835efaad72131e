#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "deconv/profile.hpp"
#include "deconv/structures.hpp"

namespace deconv {

/// Gas constant (kcal/(mol K)) times the default 310 K.
inline constexpr double kDefaultRT = 0.001987 * 310.0;

/// Default largest mask length for exhaustive enumeration.
inline constexpr std::size_t kDefaultEnumerationCap = 20;

/// Nussinov-Jacobson model with a data-agreement term weighted by c.
struct NJParams {
  double c = 1.0;
  double rt = kDefaultRT;

  explicit NJParams(double c, double rt = kDefaultRT);
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
};

struct CrossoverResult {
  double p_star = 0.0;
  /// p_star lies inside [0, 1].
  bool p_star_in_range = false;
  /// Upper bound on the crossover window length, RT ln 9 / (c |A delta B|).
  double window_bound = 0.0;
  /// Window before intersecting with [0, 1].
  Interval unclipped;
  /// Window intersected with [0, 1]; empty when the two do not meet.
  std::optional<Interval> window;
};

/// Energy of mask a given data m: -(#paired) + sum_i c |x_i - m_i| where
/// x_i = 1 for unpaired and 0 for paired positions.
double nj_energy(const PairingMask& a, const ShapeProfile& m,
                 const NJParams& params);

/// Boltzmann probabilities of a and b within the two-structure ensemble
/// {a, b}. Only the energy difference enters, so large energies are safe.
std::pair<double, double> two_structure_probs(const PairingMask& a,
                                              const PairingMask& b,
                                              const ShapeProfile& m,
                                              const NJParams& params);

/// Mixture ratio at which a and b have equal energy under the noiseless
/// mixture M(p) = p S + (1 - p) T:
///   p* = 1/2 + 1/(2c) - |A - B| / (c |A delta B|).
/// Returned unclamped; throws UndefinedCrossover when the masks agree.
double crossover_point(const PairingMask& a, const PairingMask& b,
                       const NJParams& params);

/// Range of p over which P(A)/P(B) stays within [1/9, 9]. For the two
/// structure ensemble the log-ratio is linear in p, so the window is exactly
/// the interval of length window_bound centred at p*.
CrossoverResult crossover_window(const PairingMask& a, const PairingMask& b,
                                 const NJParams& params);

/// Boltzmann distribution over all 2^n masks of length n = m.size().
/// Index bit i set means position i is paired (see PairingMask::from_bits).
struct Ensemble {
  std::size_t n = 0;
  std::vector<double> probabilities;
  /// log Z relative to the minimum energy: log sum_s exp(-(E_s - E_min)/RT).
  double log_partition_shifted = 0.0;
  double min_energy = 0.0;
};

Ensemble full_ensemble(const ShapeProfile& m, const NJParams& params,
                       std::size_t cap = kDefaultEnumerationCap);

struct TvdPoint {
  double p = 0.0;
  double p_hat = 0.0;
  double tvd = 0.0;
};

/// For each p: build M(p) from the noiseless profiles of a and b, take the
/// full ensemble, and set p_hat = P(closer to a) + P(tie) / 2.
std::vector<TvdPoint> tvd_sweep(const PairingMask& a, const PairingMask& b,
                                const NJParams& params,
                                std::span<const double> p_grid,
                                std::size_t cap = kDefaultEnumerationCap);

}  // namespace deconv
