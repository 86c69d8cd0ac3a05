#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mkt {

/// Truncated moment list m[0..n_max] with m[0] == 1 exactly.
class MomentSequence {
 public:
  /// Throws ParameterError if `values` is empty, values[0] != 1, or any
  /// entry is non-finite.
  explicit MomentSequence(std::vector<double> values);
  MomentSequence(std::initializer_list<double> values);

  /// Moments of the point mass at 0: (1, 0, 0, ...).
  static MomentSequence delta(std::size_t n_max, double location = 0.0);

  std::size_t n_max() const { return values_.size() - 1; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t n) const { return values_[n]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }

  /// First n_max + 1 entries.
  MomentSequence truncated(std::size_t n_max) const;

 private:
  std::vector<double> values_;
};

}  // namespace mkt
