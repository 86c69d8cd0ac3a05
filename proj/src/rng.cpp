#include "mkt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mkt/errors.hpp"

namespace mkt {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix64(std::uint64_t x) { return splitmix64(x); }

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  // Two rounds of mixing decorrelate neighbouring (seed, stream_id) keys.
  std::uint64_t key = mix64(seed) ^ rotl(mix64(stream_id ^ 0xD1B54A32D192ED03ULL), 23);
  key = mix64(key + stream_id);
  for (auto& word : state_) word = splitmix64(key);
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomStream::uniform() {
  // 52 random mantissa bits, shifted half a step off zero.
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, r2;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    r2 = u * u + v * v;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double f = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double sample_normal(RandomStream& s, double mean, double variance) {
  if (!(variance >= 0.0)) throw ParameterError("sample_normal: variance must be >= 0");
  if (variance == 0.0) return mean;
  return mean + std::sqrt(variance) * s.normal();
}

double sample_log_gamma(RandomStream& s, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape))
    throw ParameterError("sample_gamma: shape must be > 0");
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a)
    const double boosted = sample_log_gamma(s, shape + 1.0);
    return boosted + std::log(s.uniform()) / shape;
  }
  // Marsaglia and Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = s.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = s.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

double sample_gamma(RandomStream& s, double shape, double scale) {
  if (!(scale > 0.0)) throw ParameterError("sample_gamma: scale must be > 0");
  return scale * std::exp(sample_log_gamma(s, shape));
}

double sample_chi_tilde(RandomStream& s, double dof) {
  if (!(dof > 0.0)) throw ParameterError("sample_chi_tilde: degrees of freedom must be > 0");
  return std::exp(0.5 * sample_log_gamma(s, 0.5 * dof));
}

BetaDraw sample_beta_pair(RandomStream& s, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw ParameterError("sample_beta: parameters must be > 0");
  const double lx = sample_log_gamma(s, p);
  const double ly = sample_log_gamma(s, q);
  // x / (x + y) = 1 / (1 + exp(ly - lx))
  const double value = 1.0 / (1.0 + std::exp(ly - lx));
  const double complement = 1.0 / (1.0 + std::exp(lx - ly));
  return {value, complement};
}

double sample_beta(RandomStream& s, double p, double q) { return sample_beta_pair(s, p, q).value; }

std::vector<double> sample_dirichlet(RandomStream& s, std::span<const double> params) {
  if (params.empty()) throw ParameterError("sample_dirichlet: need at least one component");
  std::vector<double> logs(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(params[i] > 0.0)) throw ParameterError("sample_dirichlet: parameters must be > 0");
    logs[i] = sample_log_gamma(s, params[i]);
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  std::vector<double> w(params.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(logs[i] - top);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= total;
  // One more pass so the sum is 1 to the last bit we can manage.
  const double again = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= again;
  return w;
}

std::vector<double> sample_dirichlet_symmetric(RandomStream& s, std::size_t n, double parameter) {
  if (n == 0) throw ParameterError("sample_dirichlet_symmetric: N must be >= 1");
  if (!(parameter > 0.0)) throw ParameterError("sample_dirichlet_symmetric: parameter must be > 0");
  if (n == 1) return {1.0};
  const std::vector<double> params(n, parameter);
  return sample_dirichlet(s, params);
}

}  // namespace mkt
