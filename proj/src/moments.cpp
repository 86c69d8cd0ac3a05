#include "mkt/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mkt/errors.hpp"

namespace mkt {

namespace {

void require_c(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("c must be > 0");
}

// Row n of the coefficients c (n-1)!/i! (c)_i/(c)_n for i = 0..n-1.
// w[n-1] = c/(c+n-1) and w[i-1] = w[i] * i/(c+i-1).
std::vector<double> recurrence_weights(std::size_t n, double c) {
  std::vector<double> w(n);
  w[n - 1] = c / (c + static_cast<double>(n - 1));
  for (std::size_t i = n - 1; i > 0; --i)
    w[i - 1] = w[i] * static_cast<double>(i) / (c + static_cast<double>(i - 1));
  return w;
}

}  // namespace

double pochhammer(double c, std::size_t m) {
  if (m <= 20) {
    double r = 1.0;
    for (std::size_t k = 0; k < m; ++k) r *= c + static_cast<double>(k);
    return r;
  }
  if (c > 0.0) return std::exp(std::lgamma(c + static_cast<double>(m)) - std::lgamma(c));
  double r = 1.0;
  for (std::size_t k = 0; k < m; ++k) r *= c + static_cast<double>(k);
  return r;
}

MomentSequence mkt_moments(const MomentSequence& p, double c) {
  require_c(c);
  const std::size_t nmax = p.n_max();
  std::vector<double> h(nmax + 1, 0.0);
  h[0] = 1.0;
  for (std::size_t n = 1; n <= nmax; ++n) {
    const auto w = recurrence_weights(n, c);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * h[i] * p[n - i];
    h[n] = acc;
  }
  return MomentSequence(std::move(h));
}

namespace {

// Accumulates, per part count k, the sum over compositions of `remaining`
// of prod p_{a_i}/a_i.
void enumerate_compositions(std::size_t remaining, std::size_t parts, double product,
                            const MomentSequence& p, std::vector<double>& by_parts) {
  if (remaining == 0) {
    by_parts[parts] += product;
    return;
  }
  for (std::size_t a = 1; a <= remaining; ++a)
    enumerate_compositions(remaining - a, parts + 1, product * p[a] / static_cast<double>(a), p,
                           by_parts);
}

}  // namespace

MomentSequence mkt_moments_closed(const MomentSequence& p, double c) {
  require_c(c);
  const std::size_t nmax = p.n_max();
  if (nmax > kClosedFormMaxOrder)
    throw CapabilityError("mkt_moments_closed: composition enumeration is limited to n_max <= 16");
  std::vector<double> h(nmax + 1, 0.0);
  h[0] = 1.0;
  for (std::size_t m = 1; m <= nmax; ++m) {
    std::vector<double> by_parts(m + 1, 0.0);
    enumerate_compositions(m, 0, 1.0, p, by_parts);
    double acc = 0.0;
    double ck_over_kfact = 1.0;
    for (std::size_t k = 1; k <= m; ++k) {
      ck_over_kfact *= c / static_cast<double>(k);
      acc += ck_over_kfact * by_parts[k];
    }
    // m!/(c)_m as a product of ratios
    double ratio = 1.0;
    for (std::size_t k = 1; k <= m; ++k)
      ratio *= static_cast<double>(k) / (c + static_cast<double>(k - 1));
    h[m] = ratio * acc;
  }
  return MomentSequence(std::move(h));
}

MomentSequence imkt_moments(const MomentSequence& h, double c) {
  require_c(c);
  const std::size_t nmax = h.n_max();
  std::vector<double> p(nmax + 1, 0.0);
  p[0] = 1.0;
  for (std::size_t n = 1; n <= nmax; ++n) {
    const auto w = recurrence_weights(n, c);
    double acc = h[n];
    for (std::size_t i = 1; i < n; ++i) acc -= w[i] * h[i] * p[n - i];
    p[n] = acc / w[0];
  }
  return MomentSequence(std::move(p));
}

MomentSequence convolve_moments(const MomentSequence& h1, const MomentSequence& h2) {
  if (h1.n_max() != h2.n_max())
    throw ParameterError("convolve_moments: sequences must have equal n_max");
  const std::size_t nmax = h1.n_max();
  std::vector<double> out(nmax + 1, 0.0);
  std::vector<double> binom(nmax + 1, 0.0);
  binom[0] = 1.0;
  for (std::size_t n = 0; n <= nmax; ++n) {
    if (n > 0)
      for (std::size_t k = n; k > 0; --k) binom[k] += binom[k - 1];
    double acc = 0.0;
    for (std::size_t k = 0; k <= n; ++k) acc += binom[k] * h1[k] * h2[n - k];
    out[n] = acc;
  }
  out[0] = 1.0;
  return MomentSequence(std::move(out));
}

MomentSequence c_convolve(const MomentSequence& p1, const MomentSequence& p2, double c) {
  return imkt_moments(convolve_moments(mkt_moments(p1, c), mkt_moments(p2, c)), c);
}

MomentSequence reference_moments(const ReferenceLaw& law, std::size_t n_max) {
  std::vector<double> h(n_max + 1, 0.0);
  h[0] = 1.0;
  if (const auto* g = std::get_if<GaussianLaw>(&law)) {
    if (!(g->variance >= 0.0)) throw ParameterError("gaussian reference: variance must be >= 0");
    for (std::size_t n = 2; n <= n_max; n += 2)
      h[n] = h[n - 2] * static_cast<double>(n - 1) * g->variance;
  } else if (const auto* gm = std::get_if<GammaLaw>(&law)) {
    if (!(gm->shape > 0.0) || !(gm->scale > 0.0))
      throw ParameterError("gamma reference: shape and scale must be > 0");
    for (std::size_t n = 1; n <= n_max; ++n)
      h[n] = h[n - 1] * gm->scale * (gm->shape + static_cast<double>(n - 1));
  } else {
    const auto& bt = std::get<BetaLaw>(law);
    if (!(bt.p > 0.0) || !(bt.q > 0.0)) throw ParameterError("beta reference: p, q must be > 0");
    for (std::size_t n = 1; n <= n_max; ++n) {
      const double k = static_cast<double>(n - 1);
      h[n] = h[n - 1] * (bt.p + k) / (bt.p + bt.q + k);
    }
  }
  return MomentSequence(std::move(h));
}

double growth_constant(const MomentSequence& seq) {
  double best = 0.0;
  for (std::size_t n = 1; n <= seq.n_max(); ++n) {
    const double v = std::fabs(seq[n]);
    if (v == 0.0) continue;
    best = std::max(best, std::pow(v, 1.0 / static_cast<double>(n)) / static_cast<double>(n));
  }
  return best;
}

GrowthBoundReport growth_bound_fit(const MomentSequence& p, double c) {
  if (p.n_max() < 1) throw ParameterError("growth_bound_fit: need n_max >= 1");
  GrowthBoundReport r;
  r.lambda_fit = growth_constant(p);
  r.m_fit = growth_constant(mkt_moments(p, c));
  r.transform_bound = std::max(c, 2.0) * r.lambda_fit;
  return r;
}

double series_pair_check(const MomentSequence& p, const MomentSequence& h, double c,
                         std::complex<double> z, std::size_t n_trunc) {
  require_c(c);
  if (!(z.imag() > 0.0)) throw DomainError("series_pair_check: requires Im z > 0");
  if (n_trunc == 0) throw ParameterError("series_pair_check: n_trunc must be >= 1");
  if (p.n_max() + 1 < n_trunc || h.n_max() + 1 < n_trunc)
    throw ParameterError("series_pair_check: sequences shorter than n_trunc");

  // In w = 1/z:  phi = z^-c sum A_n w^n,  psi = w sum p_n w^n,
  // phi_z = -z^-c w sum B_n w^n with A_n = (c)_n/n! h_n, B_n = (c)_{n+1}/n! h_n.
  // phi_z + c phi psi = z^-c w sum_n R_n w^n, R_n = -B_n + c sum_i A_i p_{n-i}.
  const std::complex<double> w = 1.0 / z;
  const double absw = std::abs(w);
  std::vector<double> a(n_trunc), bcoef(n_trunc);
  double poch_over_fact = 1.0;  // (c)_n / n!
  for (std::size_t n = 0; n < n_trunc; ++n) {
    if (n > 0) poch_over_fact *= (c + static_cast<double>(n - 1)) / static_cast<double>(n);
    a[n] = poch_over_fact * h[n];
    bcoef[n] = poch_over_fact * (c + static_cast<double>(n)) * h[n];
  }

  // Divergence guard: the tail terms of both series must not be growing.
  if (n_trunc >= 4) {
    auto tail_growing = [&](auto term) {
      const std::size_t k = n_trunc - 1;
      const double last = term(k), prev = term(k - 1), mid = term(k / 2);
      return last > 0.0 && last > prev && last > mid;
    };
    const auto a_term = [&](std::size_t n) { return std::fabs(a[n]) * std::pow(absw, double(n)); };
    const auto p_term = [&](std::size_t n) { return std::fabs(p[n]) * std::pow(absw, double(n)); };
    if (tail_growing(a_term) || tail_growing(p_term))
      throw DomainError("series_pair_check: series terms are growing; increase |z|");
  }

  std::complex<double> acc = 0.0;
  std::complex<double> wn = 1.0;
  for (std::size_t n = 0; n < n_trunc; ++n) {
    double r = -bcoef[n];
    for (std::size_t i = 0; i <= n; ++i) r += c * a[i] * p[n - i];
    acc += r * wn;
    wn *= w;
  }
  return std::abs(acc) / c;
}

double hankel_min(const MomentSequence& m) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 2 <= m.n_max(); ++n)
    best = std::min(best, m[n] * m[n + 2] - m[n + 1] * m[n + 1]);
  return best;
}

double hankel_even_min(const MomentSequence& m) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 2 <= m.n_max(); n += 2)
    best = std::min(best, m[n] * m[n + 2] - m[n + 1] * m[n + 1]);
  return best;
}

double hausdorff_min(const MomentSequence& m) {
  double best = hankel_min(m);
  std::vector<double> d(m.n_max());
  for (std::size_t n = 0; n < m.n_max(); ++n) {
    d[n] = m[n] - m[n + 1];
    best = std::min(best, d[n]);
  }
  for (std::size_t n = 0; n + 2 < d.size(); ++n) best = std::min(best, d[n] * d[n + 2] - d[n + 1] * d[n + 1]);
  return best;
}

}  // namespace mkt
