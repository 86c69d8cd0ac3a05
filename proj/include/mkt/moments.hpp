#pragma once

#include <complex>
#include <cstddef>
#include <variant>

#include "mkt/moment_sequence.hpp"

namespace mkt {

/// Rising factorial (c)_m = c (c+1) ... (c+m-1), (c)_0 = 1. Computed as a
/// product up to m = 20 and through lgamma beyond.
double pochhammer(double c, std::size_t m);

/**
 * Markov-Krein transform at the moment level.
 *
 * Given the moments p of mu, returns the moments h of nu = M_c(mu) from
 *   (c)_n h_n = c sum_{i<n} (n-1)!/i! (c)_i h_i p_{n-i},  h_0 = 1.
 * The coefficients c (n-1)!/i! (c)_i/(c)_n are formed as bounded ratio
 * products, so there is no factorial overflow at any order.
 */
MomentSequence mkt_moments(const MomentSequence& p, double c);

/// Same transform via the explicit composition sum
///   h_m = m!/(c)_m sum_k c^k/k! sum_{a_1+..+a_k=m} prod p_{a_i}/a_i.
/// Enumerates all 2^(m-1) compositions; throws CapabilityError for n_max > 16.
MomentSequence mkt_moments_closed(const MomentSequence& p, double c);

inline constexpr std::size_t kClosedFormMaxOrder = 16;

/// Inverse transform: recovers p from h by solving the recurrence for p_n.
MomentSequence imkt_moments(const MomentSequence& h, double c);

/// Binomial convolution: moments of X + Y for independent X, Y.
MomentSequence convolve_moments(const MomentSequence& h1, const MomentSequence& h2);

/// c-convolution: imkt(mkt(p1) * mkt(p2)). Positivity of the result is not
/// guaranteed; see hankel_min / hausdorff_min for diagnostics.
MomentSequence c_convolve(const MomentSequence& p1, const MomentSequence& p2, double c);

/// N(0, t): h_{2k} = (2k-1)!! t^k, odd moments zero.
struct GaussianLaw {
  double variance = 1.0;
};
/// scale * Gamma(shape, 1): h_n = scale^n (shape)_n.
struct GammaLaw {
  double shape = 1.0;
  double scale = 1.0;
};
/// Beta(p, q): h_n = (p)_n / (p+q)_n.
struct BetaLaw {
  double p = 1.0;
  double q = 1.0;
};
using ReferenceLaw = std::variant<GaussianLaw, GammaLaw, BetaLaw>;

MomentSequence reference_moments(const ReferenceLaw& law, std::size_t n_max);

/// max over n in [1, n_max] of |seq_n|^(1/n) / n: the smallest L with
/// |seq_n| <= (L n)^n on the available orders.
double growth_constant(const MomentSequence& seq);

struct GrowthBoundReport {
  double lambda_fit = 0.0;  // growth constant of p
  double m_fit = 0.0;       // growth constant of h = mkt(p, c)
  double transform_bound = 0.0; // max(c, 2) * lambda_fit; m_fit must not exceed it
};

/// Fits both growth constants for p and its transform.
GrowthBoundReport growth_bound_fit(const MomentSequence& p, double c);

/**
 * Truncated check of the formal-series identity phi_z = -c phi psi, with
 *   phi(z) = sum (c)_n/n! h_n z^(-c-n),   psi(z) = sum p_n z^(-n-1).
 * All series are cut at n_trunc terms in 1/z and the product is truncated
 * consistently, so a matched pair leaves only round-off. The residual is
 * |phi_z + c phi psi| divided by the size c |z|^(-c-1) of the leading term.
 * Requires Im z > 0; throws DomainError if the series terms grow.
 */
double series_pair_check(const MomentSequence& p, const MomentSequence& h, double c,
                         std::complex<double> z, std::size_t n_trunc);

/// min over n of m_n m_{n+2} - m_{n+1}^2 (nonnegative for measures on [0, inf)).
double hankel_min(const MomentSequence& m);
/// min over n of m_{2k} m_{2k+2} - m_{2k+1}^2 (nonnegative for any measure on R).
double hankel_even_min(const MomentSequence& m);
/// min of first differences m_n - m_{n+1} and the 2x2 Hankel determinants of
/// the differenced sequence (nonnegative for measures on [0, 1]).
double hausdorff_min(const MomentSequence& m);

}  // namespace mkt
