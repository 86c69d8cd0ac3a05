#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "mkt/moment_sequence.hpp"

namespace mkt {

/**
 * Finitely supported probability measure sum_i w_i delta_{x_i}.
 *
 * Locations are strictly increasing; atoms closer than 1e-12 (1 + |x|) are
 * merged and their weights added. Weights are nonnegative and sum to 1
 * within 1e-10.
 */
class AtomicMeasure {
 public:
  AtomicMeasure(std::vector<double> locations, std::vector<double> weights);

  static AtomicMeasure point(double location) { return AtomicMeasure({location}, {1.0}); }

  std::span<const double> locations() const { return locations_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return locations_.size(); }

 private:
  std::vector<double> locations_;
  std::vector<double> weights_;
};

/// Uniform-weight measure on the given points (the empirical measure L_N).
AtomicMeasure empirical_measure(std::span<const double> points);

/// Weighted power sums sum_i w_i x_i^n for n = 0..n_max.
MomentSequence moments_of_measure(const AtomicMeasure& m, std::size_t n_max);

/// Power sums (1/N) sum_i x_i^n without building a measure.
std::vector<double> power_means(std::span<const double> points, std::size_t n_max);

/// Principal-branch log on C \ (-inf, 0]. Rejects the cut.
std::complex<double> principal_log(std::complex<double> z);

/// sum_i w_i (z - x_i)^(-c) with the principal branch. Im z must be nonzero.
std::complex<double> gen_stieltjes(const AtomicMeasure& m, std::complex<double> z, double c);

/// <m, log(z - x)> with the principal branch. Im z must be nonzero.
std::complex<double> log_potential(const AtomicMeasure& m, std::complex<double> z);

}  // namespace mkt
