#pragma once

#include <cstddef>
#include <cstdint>

#include "deconv/nj_model.hpp"

namespace deconv {

struct PnQuery {
  std::size_t n = 1;
  double q = 0.6;
  double rt = kDefaultRT;

  PnQuery(std::size_t n, double q, double rt = kDefaultRT);
};

struct PnResult {
  std::size_t n = 0;
  double best_cutoff = 0.0;
  double case1 = 0.0;
  double case2 = 0.0;
  double lower_bound = 0.0;
};

/// P(p* outside (0.25, 0.75)) for two random masks of length n, with the
/// identical-mask outcome (p* undefined) excluded:
///   2 sum_{i<n} C(n,i) (q^2+(1-q)^2)^i (q(1-q))^{n-i}
///     sum_{j <= floor((1/2 - c/4)(n-i))} C(n-i, j).
double case1_prob(std::size_t n, double q, double c);

/// P(|A delta B| >= RT ln 9 / (0.3 c)), i.e. the probability that the
/// crossover window bound is at most 0.3. |A delta B| ~ Binomial(n, 2q(1-q)).
double case2_prob(std::size_t n, double q, double c, double rt = kDefaultRT);

/// Cutoff at which case2's threshold equals k exactly: RT ln 9 / (0.3 k).
double case2_step_cutoff(std::size_t k, double rt = kDefaultRT);

/// Best lower bound on the failure probability over all cutoffs. Only the
/// case2 step points need checking: between steps case2 is constant and
/// case1 is largest at the left edge.
PnResult pn_lower_bound(const PnQuery& query);

/// Sampling check: frequency of mask pairs with p* outside (0.25, 0.75) or
/// window bound <= 0.3. Pairs with no differing position count as
/// successes. Trials are split into fixed blocks with derived seeds.
double monte_carlo_failure(std::size_t n, double q, double c,
                           std::size_t trials, std::uint64_t seed,
                           double rt = kDefaultRT);

/// Same sampling scheme, reporting each sufficient condition separately.
struct FailureFrequencies {
  double uncentered = 0.0;    // p* outside (0.25, 0.75)
  double narrow_window = 0.0; // window bound <= 0.3
  double either = 0.0;
};

FailureFrequencies monte_carlo_failure_breakdown(std::size_t n, double q,
                                                 double c, std::size_t trials,
                                                 std::uint64_t seed,
                                                 double rt = kDefaultRT);

}  // namespace deconv
