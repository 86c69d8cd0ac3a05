#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mkt {

/// Seed used when the caller does not supply one.
inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

/**
 * Reproducible random stream keyed by (seed, stream_id).
 *
 * The engine is xoshiro256** whose state is derived from the key through
 * SplitMix64, so any replica or particle index can open its own stream
 * without coordinating with the others. A stream is a plain value: copy it,
 * move it to a worker thread, but never share one instance between threads.
 */
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = kDefaultSeed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform();

  /// Standard normal via the Marsaglia polar method (spare value cached).
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

double sample_normal(RandomStream& s, double mean, double variance);

/// Gamma(shape, scale). Any shape > 0 is supported; for shape < 1 the draw
/// goes through the log domain so tiny shapes such as c/N stay accurate.
double sample_gamma(RandomStream& s, double shape, double scale);

/// log of a Gamma(shape, 1) draw. Finite even when the draw itself would
/// underflow a double.
double sample_log_gamma(RandomStream& s, double shape);

/// chi_k / sqrt(2), i.e. sqrt(Gamma(k/2, 1)).
double sample_chi_tilde(RandomStream& s, double dof);

struct BetaDraw {
  double value;
  double complement;  // 1 - value, computed without cancellation
};

double sample_beta(RandomStream& s, double p, double q);
BetaDraw sample_beta_pair(RandomStream& s, double p, double q);

/// Dirichlet(params) as normalized gamma draws, normalized in the log domain.
std::vector<double> sample_dirichlet(RandomStream& s, std::span<const double> params);
std::vector<double> sample_dirichlet_symmetric(RandomStream& s, std::size_t n, double parameter);

}  // namespace mkt
