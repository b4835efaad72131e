#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "deconv/profile.hpp"
#include "deconv/random.hpp"

namespace deconv {

enum class Pairing : std::uint8_t { Unpaired = 0, Paired = 1 };

/// Paired/unpaired state per nucleotide. Text form uses 'x' for paired and
/// '.' for unpaired.
class PairingMask {
 public:
  explicit PairingMask(std::vector<Pairing> states);

  /// Parses a single line of 'x' / '.' characters. Throws ParseError on any
  /// other character or on an empty string.
  static PairingMask parse(std::string_view text);

  /// Builds a mask of length n from the low n bits of `bits` (bit i set means
  /// position i is paired).
  static PairingMask from_bits(std::uint64_t bits, std::size_t n);

  std::size_t size() const { return states_.size(); }
  bool paired(std::size_t i) const { return states_[i] == Pairing::Paired; }
  Pairing operator[](std::size_t i) const { return states_[i]; }
  const std::vector<Pairing>& states() const { return states_; }

  std::size_t paired_count() const;
  std::string to_string() const;

  friend bool operator==(const PairingMask&, const PairingMask&) = default;

 private:
  std::vector<Pairing> states_;
};

struct PairStats {
  std::size_t n = 0;
  std::size_t bp_a = 0;
  std::size_t bp_b = 0;
  std::size_t bp_a_minus_b = 0;
  std::size_t bp_b_minus_a = 0;
  std::size_t bp_symdiff = 0;
  std::size_t agree = 0;

  friend bool operator==(const PairStats&, const PairStats&) = default;
};

/// Positions are paired independently with probability q.
struct RandomStructureModel {
  double q = 0.6;
  std::uint64_t seed = 0;

  RandomStructureModel(double q, std::uint64_t seed);
};

enum class Closeness { CloserToA, CloserToB, Tie };

PairStats pair_stats(const PairingMask& a, const PairingMask& b);

/// Draws a mask from the model's own stream (seeded by model.seed).
PairingMask random_mask(const RandomStructureModel& model, std::size_t n);

/// Draws a mask from a caller-owned stream.
PairingMask random_mask(double q, std::size_t n, Rng& rng);

/// Paired positions read 0.0, unpaired 1.0.
ShapeProfile noiseless_profile(const PairingMask& a);

/// F-measure with paired positions as the positive class. Two all-unpaired
/// masks agree perfectly and score 1.
double f_measure(const PairingMask& s, const PairingMask& a);

Closeness classify(const PairingMask& s, const PairingMask& a,
                   const PairingMask& b);

}  // namespace deconv
