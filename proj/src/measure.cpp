#include "mkt/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mkt/errors.hpp"

namespace mkt {

MomentSequence::MomentSequence(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ParameterError("moment sequence must contain m[0]");
  if (values_[0] != 1.0) throw ParameterError("moment sequence must have m[0] = 1");
  for (double v : values_)
    if (!std::isfinite(v)) throw ParameterError("moment sequence has a non-finite entry");
}

MomentSequence::MomentSequence(std::initializer_list<double> values)
    : MomentSequence(std::vector<double>(values)) {}

MomentSequence MomentSequence::delta(std::size_t n_max, double location) {
  std::vector<double> v(n_max + 1);
  double p = 1.0;
  for (auto& x : v) {
    x = p;
    p *= location;
  }
  return MomentSequence(std::move(v));
}

MomentSequence MomentSequence::truncated(std::size_t n_max) const {
  if (n_max > this->n_max()) throw ParameterError("cannot extend a moment sequence by truncation");
  return MomentSequence(std::vector<double>(values_.begin(), values_.begin() + n_max + 1));
}

AtomicMeasure::AtomicMeasure(std::vector<double> locations, std::vector<double> weights) {
  if (locations.empty()) throw ParameterError("atomic measure needs at least one atom");
  if (locations.size() != weights.size())
    throw ParameterError("atomic measure: locations and weights differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(locations[i])) throw ParameterError("atomic measure: non-finite location");
    if (!(weights[i] >= 0.0)) throw ParameterError("atomic measure: weights must be >= 0");
    total += weights[i];
  }
  if (std::fabs(total - 1.0) > 1e-10)
    throw ParameterError("atomic measure: weights must sum to 1");

  std::vector<std::size_t> order(locations.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return locations[a] < locations[b]; });
  for (std::size_t k : order) {
    const double x = locations[k];
    if (!locations_.empty() &&
        x - locations_.back() < 1e-12 * (1.0 + std::fabs(locations_.back()))) {
      weights_.back() += weights[k];
    } else {
      locations_.push_back(x);
      weights_.push_back(weights[k]);
    }
  }
}

AtomicMeasure empirical_measure(std::span<const double> points) {
  if (points.empty()) throw ParameterError("empirical_measure: no points");
  const double w = 1.0 / static_cast<double>(points.size());
  return AtomicMeasure(std::vector<double>(points.begin(), points.end()),
                       std::vector<double>(points.size(), w));
}

MomentSequence moments_of_measure(const AtomicMeasure& m, std::size_t n_max) {
  std::vector<double> out(n_max + 1, 0.0);
  const auto x = m.locations();
  const auto w = m.weights();
  for (std::size_t i = 0; i < m.size(); ++i) {
    double p = w[i];
    for (std::size_t n = 1; n <= n_max; ++n) {
      p *= x[i];
      out[n] += p;
    }
  }
  out[0] = 1.0;
  return MomentSequence(std::move(out));
}

std::vector<double> power_means(std::span<const double> points, std::size_t n_max) {
  if (points.empty()) throw ParameterError("power_means: no points");
  std::vector<double> out(n_max + 1, 0.0);
  for (double x : points) {
    double p = 1.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
      p *= x;
      out[n] += p;
    }
  }
  const double inv = 1.0 / static_cast<double>(points.size());
  for (auto& v : out) v *= inv;
  out[0] = 1.0;
  return out;
}

std::complex<double> principal_log(std::complex<double> z) {
  if (z.imag() == 0.0 && z.real() <= 0.0)
    throw DomainError("principal log is undefined on (-inf, 0]");
  return {std::log(std::abs(z)), std::arg(z)};
}

namespace {
void require_off_axis(std::complex<double> z) {
  if (z.imag() == 0.0) throw DomainError("z must lie off the real line");
}
}  // namespace

std::complex<double> gen_stieltjes(const AtomicMeasure& m, std::complex<double> z, double c) {
  require_off_axis(z);
  if (!(c > 0.0)) throw ParameterError("gen_stieltjes: c must be > 0");
  std::complex<double> acc = 0.0;
  const auto x = m.locations();
  const auto w = m.weights();
  for (std::size_t i = 0; i < m.size(); ++i) acc += w[i] * std::exp(-c * principal_log(z - x[i]));
  return acc;
}

std::complex<double> log_potential(const AtomicMeasure& m, std::complex<double> z) {
  require_off_axis(z);
  std::complex<double> acc = 0.0;
  const auto x = m.locations();
  const auto w = m.weights();
  for (std::size_t i = 0; i < m.size(); ++i) acc += w[i] * principal_log(z - x[i]);
  return acc;
}

}  // namespace mkt
