#include "deconv/structures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deconv/error.hpp"

namespace deconv {

namespace {

void require_same_length(const PairingMask& a, const PairingMask& b,
                         const char* op) {
  if (a.size() != b.size()) {
    throw InvalidArgument(std::string(op) + ": mask lengths differ (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
}

}  // namespace

PairingMask::PairingMask(std::vector<Pairing> states)
    : states_(std::move(states)) {
  if (states_.empty()) {
    throw InvalidArgument("PairingMask: length must be at least 1");
  }
}

PairingMask PairingMask::parse(std::string_view text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) {
    throw ParseError("mask: empty string");
  }
  std::vector<Pairing> states;
  states.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    switch (text[i]) {
      case 'x':
        states.push_back(Pairing::Paired);
        break;
      case '.':
        states.push_back(Pairing::Unpaired);
        break;
      default:
        throw ParseError("mask: invalid character '" + std::string(1, text[i]) +
                         "' at position " + std::to_string(i));
    }
  }
  return PairingMask(std::move(states));
}

PairingMask PairingMask::from_bits(std::uint64_t bits, std::size_t n) {
  std::vector<Pairing> states(n);
  for (std::size_t i = 0; i < n; ++i) {
    states[i] = ((bits >> i) & 1U) ? Pairing::Paired : Pairing::Unpaired;
  }
  return PairingMask(std::move(states));
}

std::size_t PairingMask::paired_count() const {
  return static_cast<std::size_t>(
      std::count(states_.begin(), states_.end(), Pairing::Paired));
}

std::string PairingMask::to_string() const {
  std::string out(states_.size(), '.');
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (paired(i)) out[i] = 'x';
  }
  return out;
}

RandomStructureModel::RandomStructureModel(double q, std::uint64_t seed)
    : q(q), seed(seed) {
  if (!(q > 0.0 && q < 1.0)) {
    throw InvalidArgument("RandomStructureModel: q must lie in (0, 1)");
  }
}

PairStats pair_stats(const PairingMask& a, const PairingMask& b) {
  require_same_length(a, b, "pair_stats");
  PairStats s;
  s.n = a.size();
  for (std::size_t i = 0; i < s.n; ++i) {
    const bool pa = a.paired(i);
    const bool pb = b.paired(i);
    s.bp_a += pa;
    s.bp_b += pb;
    s.bp_a_minus_b += pa && !pb;
    s.bp_b_minus_a += pb && !pa;
    s.agree += pa == pb;
  }
  s.bp_symdiff = s.bp_a_minus_b + s.bp_b_minus_a;
  return s;
}

PairingMask random_mask(double q, std::size_t n, Rng& rng) {
  std::vector<Pairing> states(n);
  for (auto& st : states) {
    st = rng.uniform01() < q ? Pairing::Paired : Pairing::Unpaired;
  }
  return PairingMask(std::move(states));
}

PairingMask random_mask(const RandomStructureModel& model, std::size_t n) {
  Rng rng(model.seed);
  return random_mask(model.q, n, rng);
}

ShapeProfile noiseless_profile(const PairingMask& a) {
  std::vector<double> values(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    values[i] = a.paired(i) ? 0.0 : 1.0;
  }
  return ShapeProfile(std::move(values));
}

double f_measure(const PairingMask& s, const PairingMask& a) {
  require_same_length(s, a, "f_measure");
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool ps = s.paired(i);
    const bool pa = a.paired(i);
    tp += ps && pa;
    fp += ps && !pa;
    fn += pa && !ps;
  }
  const std::size_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 1.0;
  return static_cast<double>(2 * tp) / static_cast<double>(denom);
}

Closeness classify(const PairingMask& s, const PairingMask& a,
                   const PairingMask& b) {
  require_same_length(s, a, "classify");
  require_same_length(s, b, "classify");
  const double fa = f_measure(s, a);
  const double fb = f_measure(s, b);
  if (fa > fb) return Closeness::CloserToA;
  if (fb > fa) return Closeness::CloserToB;
  return Closeness::Tie;
}

}  // namespace deconv
