#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace deconv {

/// Per-nucleotide reactivities (unitless).
class ShapeProfile {
 public:
  ShapeProfile() = default;
  explicit ShapeProfile(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const ShapeProfile&, const ShapeProfile&) = default;

 private:
  std::vector<double> values_;
};

}  // namespace deconv
