#include "deconv/nj_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "deconv/error.hpp"
#include "deconv/parallel.hpp"

namespace deconv {

namespace {

// Fixed partition of the mask space; partial sums are reduced in chunk order
// so the result is independent of the worker count.
constexpr std::size_t kChunks = 64;

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw CapExceeded("enumeration of 2^" + std::to_string(n) +
                      " masks refused (cap " + std::to_string(cap) + ")");
  }
  if (n >= 63) {
    throw CapExceeded("enumeration beyond 2^62 masks is not representable");
  }
}

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// Per-position energy contributions for the paired and unpaired state.
struct SiteEnergies {
  std::vector<double> paired;
  std::vector<double> unpaired;
  double min_total = 0.0;
};

SiteEnergies site_energies(const ShapeProfile& m, const NJParams& params) {
  SiteEnergies e;
  e.paired.resize(m.size());
  e.unpaired.resize(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    e.paired[i] = -1.0 + params.c * std::abs(0.0 - m[i]);
    e.unpaired[i] = params.c * std::abs(1.0 - m[i]);
    e.min_total += std::min(e.paired[i], e.unpaired[i]);
  }
  return e;
}

double mask_energy(std::uint64_t bits, const SiteEnergies& e) {
  double total = 0.0;
  for (std::size_t i = 0; i < e.paired.size(); ++i) {
    total += ((bits >> i) & 1U) ? e.paired[i] : e.unpaired[i];
  }
  return total;
}

struct ChunkRange {
  std::uint64_t begin;
  std::uint64_t end;
};

ChunkRange chunk_range(std::uint64_t total, std::size_t chunk) {
  const std::uint64_t per = (total + kChunks - 1) / kChunks;
  const std::uint64_t begin = std::min<std::uint64_t>(total, chunk * per);
  return {begin, std::min<std::uint64_t>(total, begin + per)};
}

ShapeProfile noiseless_mixture(const ShapeProfile& s, const ShapeProfile& t,
                               double p) {
  std::vector<double> values(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    values[i] = p * s[i] + (1.0 - p) * t[i];
  }
  return ShapeProfile(std::move(values));
}

}  // namespace

NJParams::NJParams(double c, double rt) : c(c), rt(rt) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw InvalidArgument("NJParams: c must be finite and non-negative");
  }
  if (!(rt > 0.0) || !std::isfinite(rt)) {
    throw InvalidArgument("NJParams: rt must be positive");
  }
}

double nj_energy(const PairingMask& a, const ShapeProfile& m,
                 const NJParams& params) {
  if (a.size() != m.size()) {
    throw InvalidArgument("nj_energy: mask and profile lengths differ");
  }
  double data_term = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.paired(i) ? 0.0 : 1.0;
    data_term += std::abs(x - m[i]);
  }
  return -static_cast<double>(a.paired_count()) + params.c * data_term;
}

std::pair<double, double> two_structure_probs(const PairingMask& a,
                                              const PairingMask& b,
                                              const ShapeProfile& m,
                                              const NJParams& params) {
  if (a.size() != b.size()) {
    throw InvalidArgument("two_structure_probs: mask lengths differ");
  }
  // P(A) = 1 / (1 + exp(d)) with d = (E_A - E_B) / RT.
  const double d =
      (nj_energy(a, m, params) - nj_energy(b, m, params)) / params.rt;
  if (d > 0.0) {
    const double e = std::exp(-d);
    return {e / (1.0 + e), 1.0 / (1.0 + e)};
  }
  const double e = std::exp(d);
  return {1.0 / (1.0 + e), e / (1.0 + e)};
}

double crossover_point(const PairingMask& a, const PairingMask& b,
                       const NJParams& params) {
  const PairStats s = pair_stats(a, b);
  if (s.bp_symdiff == 0) {
    throw UndefinedCrossover(
        "crossover undefined: masks have no differing positions");
  }
  if (!(params.c > 0.0)) {
    throw InvalidArgument("crossover_point: c must be positive");
  }
  return 0.5 + 1.0 / (2.0 * params.c) -
         static_cast<double>(s.bp_a_minus_b) /
             (params.c * static_cast<double>(s.bp_symdiff));
}

CrossoverResult crossover_window(const PairingMask& a, const PairingMask& b,
                                 const NJParams& params) {
  CrossoverResult r;
  r.p_star = crossover_point(a, b, params);
  r.p_star_in_range = r.p_star >= 0.0 && r.p_star <= 1.0;
  const double symdiff = static_cast<double>(pair_stats(a, b).bp_symdiff);
  r.window_bound = params.rt * std::log(9.0) / (params.c * symdiff);
  r.unclipped = {r.p_star - r.window_bound / 2.0,
                 r.p_star + r.window_bound / 2.0};
  const double lo = std::max(0.0, r.unclipped.lo);
  const double hi = std::min(1.0, r.unclipped.hi);
  if (lo <= hi) r.window = Interval{lo, hi};
  return r;
}

Ensemble full_ensemble(const ShapeProfile& m, const NJParams& params,
                       std::size_t cap) {
  const std::size_t n = m.size();
  if (n == 0) throw InvalidArgument("full_ensemble: empty profile");
  check_cap(n, cap);

  const SiteEnergies e = site_energies(m, params);
  const std::uint64_t total = std::uint64_t{1} << n;

  Ensemble out;
  out.n = n;
  out.min_energy = e.min_total;
  out.probabilities.resize(total);

  std::vector<double> partial(kChunks, 0.0);
  parallel_for(kChunks, [&](std::size_t chunk) {
    const auto [begin, end] = chunk_range(total, chunk);
    CompensatedSum sum;
    for (std::uint64_t bits = begin; bits < end; ++bits) {
      const double w = std::exp(-(mask_energy(bits, e) - e.min_total) / params.rt);
      out.probabilities[bits] = w;
      sum.add(w);
    }
    partial[chunk] = sum.value();
  });

  CompensatedSum z;
  for (double v : partial) z.add(v);
  const double norm = z.value();
  for (double& w : out.probabilities) w /= norm;
  out.log_partition_shifted = std::log(norm);
  return out;
}

std::vector<TvdPoint> tvd_sweep(const PairingMask& a, const PairingMask& b,
                                const NJParams& params,
                                std::span<const double> p_grid,
                                std::size_t cap) {
  if (a.size() != b.size()) {
    throw InvalidArgument("tvd_sweep: mask lengths differ");
  }
  const std::size_t n = a.size();
  check_cap(n, cap);
  for (double p : p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument("tvd_sweep: grid value outside [0, 1]");
    }
  }

  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<Closeness> classes(total);
  parallel_for(kChunks, [&](std::size_t chunk) {
    const auto [begin, end] = chunk_range(total, chunk);
    for (std::uint64_t bits = begin; bits < end; ++bits) {
      classes[bits] = classify(PairingMask::from_bits(bits, n), a, b);
    }
  });

  const ShapeProfile s = noiseless_profile(a);
  const ShapeProfile t = noiseless_profile(b);

  std::vector<TvdPoint> out;
  out.reserve(p_grid.size());
  for (double p : p_grid) {
    const SiteEnergies e = site_energies(noiseless_mixture(s, t, p), params);
    std::vector<double> z_part(kChunks, 0.0);
    std::vector<double> a_part(kChunks, 0.0);
    parallel_for(kChunks, [&](std::size_t chunk) {
      const auto [begin, end] = chunk_range(total, chunk);
      CompensatedSum z;
      CompensatedSum closer_a;
      for (std::uint64_t bits = begin; bits < end; ++bits) {
        const double w =
            std::exp(-(mask_energy(bits, e) - e.min_total) / params.rt);
        z.add(w);
        switch (classes[bits]) {
          case Closeness::CloserToA:
            closer_a.add(w);
            break;
          case Closeness::Tie:
            closer_a.add(0.5 * w);
            break;
          case Closeness::CloserToB:
            break;
        }
      }
      z_part[chunk] = z.value();
      a_part[chunk] = closer_a.value();
    });
    CompensatedSum z;
    CompensatedSum closer_a;
    for (std::size_t c = 0; c < kChunks; ++c) {
      z.add(z_part[c]);
      closer_a.add(a_part[c]);
    }
    const double p_hat = closer_a.value() / z.value();
    out.push_back({p, p_hat, std::abs(p - p_hat)});
  }
  return out;
}

}  // namespace deconv
