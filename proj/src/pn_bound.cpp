#include "deconv/pn_bound.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "deconv/error.hpp"
#include "deconv/parallel.hpp"
#include "deconv/random.hpp"
#include "deconv/structures.hpp"

namespace deconv {

namespace {

using Real = long double;

constexpr std::size_t kTrialsPerBlock = 4096;
constexpr double kWindowThreshold = 0.3;

Real log_choose(std::size_t n, std::size_t k) {
  return std::lgamma(static_cast<Real>(n) + 1) -
         std::lgamma(static_cast<Real>(k) + 1) -
         std::lgamma(static_cast<Real>(n - k) + 1);
}

// Kahan-Babuska summation in extended precision.
class Accumulator {
 public:
  void add(Real x) {
    const Real t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  Real value() const { return sum_ + carry_; }

 private:
  Real sum_ = 0;
  Real carry_ = 0;
};

void check_q(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw InvalidArgument("q must lie in (0, 1)");
  }
}

void check_c(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidArgument("c must be positive and finite");
  }
}

// Largest j with j <= (1/2 - c/4) k, or -1 when that bound is negative.
long case1_limit(double c, std::size_t k) {
  const Real bound = (Real{0.5} - static_cast<Real>(c) / 4) * static_cast<Real>(k);
  if (bound < 0) return -1;
  return static_cast<long>(std::floor(bound));
}

// Smallest integer m >= rt ln 9 / (0.3 c). Thresholds within a relative
// 1e-9 of an integer snap to it, so the cutoff RT ln 9 / (0.3 k) maps back
// to exactly k despite rounding.
long case2_threshold(double c, double rt) {
  const Real t = static_cast<Real>(rt) * std::log(Real{9}) /
                 (Real{kWindowThreshold} * static_cast<Real>(c));
  const Real nearest = std::round(t);
  if (std::fabs(t - nearest) <= Real{1e-9} * std::max(Real{1}, nearest)) {
    return static_cast<long>(nearest);
  }
  return static_cast<long>(std::ceil(t));
}

// Tables shared by the case probabilities for a fixed (n, q).
class BinomialTables {
 public:
  BinomialTables(std::size_t n, double q) : n_(n), q_(q) {
    // prefix_[k][j] = log sum_{j' <= j} C(k, j').
    prefix_.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      auto& row = prefix_[k];
      row.resize(k + 1);
      Real running = -INFINITY;
      for (std::size_t j = 0; j <= k; ++j) {
        const Real term = log_choose(k, j);
        const Real hi = std::max(running, term);
        running = hi + std::log(std::exp(running - hi) + std::exp(term - hi));
        row[j] = running;
      }
    }

    const Real qq = static_cast<Real>(q);
    const Real log_same = std::log(qq * qq + (1 - qq) * (1 - qq));
    const Real log_one_way = std::log(qq * (1 - qq));
    const Real log_diff = std::log(2 * qq * (1 - qq));

    // weight_[i]: log of C(n,i) (q^2+(1-q)^2)^i (q(1-q))^{n-i}.
    weight_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      weight_[i] = log_choose(n, i) + static_cast<Real>(i) * log_same +
                   static_cast<Real>(n - i) * log_one_way;
    }

    // tail_[m] = P(Binomial(n, 2q(1-q)) >= m), summed from the top.
    tail_.assign(n + 2, 0);
    Accumulator acc;
    for (std::size_t d = n + 1; d-- > 0;) {
      acc.add(std::exp(log_choose(n, d) + static_cast<Real>(d) * log_diff +
                       static_cast<Real>(n - d) * log_same));
      tail_[d] = acc.value();
    }
  }

  Real case1(double c) const {
    Accumulator acc;
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t k = n_ - i;
      const long j = case1_limit(c, k);
      if (j < 0) continue;
      acc.add(std::exp(weight_[i] + prefix_[k][static_cast<std::size_t>(
                                        std::min<long>(j, static_cast<long>(k)))]));
    }
    return std::clamp(2 * acc.value(), Real{0}, Real{1});
  }

  Real tail(long m) const {
    if (m <= 0) return 1;
    if (static_cast<std::size_t>(m) > n_) return 0;
    return std::clamp(tail_[static_cast<std::size_t>(m)], Real{0}, Real{1});
  }

 private:
  std::size_t n_;
  double q_;
  std::vector<std::vector<Real>> prefix_;
  std::vector<Real> weight_;
  std::vector<Real> tail_;
};

}  // namespace

PnQuery::PnQuery(std::size_t n, double q, double rt) : n(n), q(q), rt(rt) {
  if (n == 0) throw InvalidArgument("PnQuery: n must be at least 1");
  check_q(q);
  if (!(rt > 0.0)) throw InvalidArgument("PnQuery: rt must be positive");
}

double case1_prob(std::size_t n, double q, double c) {
  check_q(q);
  check_c(c);
  if (n == 0) return 0.0;
  if (c >= 2.0) return 0.0;
  return static_cast<double>(BinomialTables(n, q).case1(c));
}

double case2_prob(std::size_t n, double q, double c, double rt) {
  check_q(q);
  check_c(c);
  const long m = case2_threshold(c, rt);
  if (m <= 0) return 1.0;
  if (static_cast<std::size_t>(m) > n) return 0.0;
  return static_cast<double>(BinomialTables(n, q).tail(m));
}

double case2_step_cutoff(std::size_t k, double rt) {
  return rt * std::log(9.0) / (kWindowThreshold * static_cast<double>(k));
}

PnResult pn_lower_bound(const PnQuery& query) {
  const BinomialTables tables(query.n, query.q);

  // At c = 2 and above case1 vanishes; this is the fallback when no step
  // point gives a positive minimum.
  PnResult best;
  best.n = query.n;
  best.best_cutoff = 2.0;
  best.case1 = 0.0;
  best.case2 = static_cast<double>(tables.tail(case2_threshold(2.0, query.rt)));
  best.lower_bound = 0.0;

  for (std::size_t k = 1; k <= query.n; ++k) {
    const double cutoff = case2_step_cutoff(k, query.rt);
    const double c1 = cutoff >= 2.0 ? 0.0 : static_cast<double>(tables.case1(cutoff));
    const double c2 = static_cast<double>(tables.tail(case2_threshold(cutoff, query.rt)));
    const double bound = std::min(c1, c2);
    if (bound > best.lower_bound) {
      best.best_cutoff = cutoff;
      best.case1 = c1;
      best.case2 = c2;
      best.lower_bound = bound;
    }
  }
  return best;
}

FailureFrequencies monte_carlo_failure_breakdown(std::size_t n, double q,
                                                 double c, std::size_t trials,
                                                 std::uint64_t seed,
                                                 double rt) {
  check_q(q);
  check_c(c);
  if (n == 0) throw InvalidArgument("monte_carlo_failure: n must be >= 1");
  if (trials == 0) throw InvalidArgument("monte_carlo_failure: trials must be >= 1");

  const NJParams params(c, rt);
  const std::size_t blocks = (trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  struct Counts {
    std::size_t uncentered = 0;
    std::size_t narrow = 0;
    std::size_t either = 0;
  };
  std::vector<Counts> counts(blocks);

  parallel_for(blocks, [&](std::size_t block) {
    Rng rng = Rng::for_task(seed, block);
    const std::size_t begin = block * kTrialsPerBlock;
    const std::size_t end = std::min(trials, begin + kTrialsPerBlock);
    Counts local;
    for (std::size_t t = begin; t < end; ++t) {
      const PairingMask a = random_mask(q, n, rng);
      const PairingMask b = random_mask(q, n, rng);
      if (pair_stats(a, b).bp_symdiff == 0) continue;
      const CrossoverResult w = crossover_window(a, b, params);
      const bool uncentered = !(w.p_star > 0.25 && w.p_star < 0.75);
      const bool narrow = w.window_bound <= kWindowThreshold;
      local.uncentered += uncentered;
      local.narrow += narrow;
      local.either += uncentered || narrow;
    }
    counts[block] = local;
  });

  Counts total;
  for (const auto& cnt : counts) {
    total.uncentered += cnt.uncentered;
    total.narrow += cnt.narrow;
    total.either += cnt.either;
  }
  const double denom = static_cast<double>(trials);
  return {static_cast<double>(total.uncentered) / denom,
          static_cast<double>(total.narrow) / denom,
          static_cast<double>(total.either) / denom};
}

double monte_carlo_failure(std::size_t n, double q, double c,
                           std::size_t trials, std::uint64_t seed, double rt) {
  return monte_carlo_failure_breakdown(n, q, c, trials, seed, rt).either;
}

}  // namespace deconv
