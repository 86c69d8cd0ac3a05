#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mkt/moment_sequence.hpp"
#include "mkt/polynomial.hpp"

namespace mkt {

/// Dyson-type dynamics dx = sigma db + sigma^2 (c/N) sum 1/(x_i - x_j) dt.
struct GaussianDynamics {
  double sigma = 1.0;
};
/// Laguerre dynamics in the sigma-scaled form.
struct LaguerreDynamics {
  double alpha = 1.0;
  double sigma = 1.0;
};
struct JacobiDynamics {
  double a = 0.0;
  double b = 0.0;
};
using FlowModel = std::variant<GaussianDynamics, LaguerreDynamics, JacobiDynamics>;

std::string model_name(const FlowModel& m);

struct FlowSpec {
  FlowModel model = GaussianDynamics{};
  double c = 1.0;
  MomentSequence init = MomentSequence::delta(8);
  std::size_t n_max = 8;
  double horizon = 1.0;

  void validate() const;
};

inline constexpr std::size_t kMaxFlowOrder = 12;
inline constexpr double kDefaultFlowStep = 1e-3;

/// Sum of exponentials sum_k coeff_k exp(rate_k t).
struct ExponentialSum {
  std::vector<double> rates;
  std::vector<double> coeffs;
  double operator()(double t) const;
  double derivative(double t) const;
};

/**
 * Time-indexed family m_0(t), ..., m_{n_max}(t) on [0, T].
 *
 * Three storage forms: exact polynomials in t, exact exponential sums, or
 * values and slopes on a uniform grid (cubic Hermite between nodes, exact at
 * nodes).
 */
class MomentFlow {
 public:
  enum class Kind { polynomial, exponential, grid };

  static MomentFlow from_polynomials(std::vector<Polynomial> orders, double horizon);
  static MomentFlow from_exponentials(std::vector<ExponentialSum> orders, double horizon);
  static MomentFlow from_grid(double step, std::vector<std::vector<double>> values,
                              std::vector<std::vector<double>> slopes, double horizon);

  Kind kind() const { return kind_; }
  std::size_t n_max() const { return n_max_; }
  double horizon() const { return horizon_; }

  double value(std::size_t n, double t) const;
  /// All orders at time t; entry 0 is exactly 1.
  std::vector<double> at(double t) const;
  MomentSequence moments_at(double t) const { return MomentSequence(at(t)); }

  const Polynomial& polynomial(std::size_t n) const;
  double grid_step() const { return step_; }
  std::size_t grid_size() const { return values_.size(); }

 private:
  MomentFlow() = default;
  Kind kind_ = Kind::polynomial;
  std::size_t n_max_ = 0;
  double horizon_ = 0.0;
  std::vector<Polynomial> polys_;
  std::vector<ExponentialSum> exps_;
  double step_ = 0.0;
  std::vector<std::vector<double>> values_;  // [node][order]
  std::vector<std::vector<double>> slopes_;
};

/// Right-hand side of a triangular moment ODE: writes dm/dt given m.
using MomentRhs = std::function<void(std::span<const double>, std::span<double>)>;
/// Called after every accepted step; throw to reject.
using StepGuard = std::function<void(double t, std::span<const double>)>;

MomentRhs mean_field_rhs(const FlowModel& model, double c);
MomentRhs companion_rhs(const FlowModel& model, double c);

/// Classical fixed-step RK4 on [0, T]; the step is T / ceil(T / dt).
MomentFlow integrate_rk4(const MomentRhs& rhs, std::vector<double> init, double horizon, double dt,
                         const StepGuard& guard = {});

/// Exact polynomial flow of the Gaussian recursion.
MomentFlow gaussian_flow(const FlowSpec& spec);
/// Exact polynomial flow of the Laguerre recursion.
MomentFlow laguerre_flow(const FlowSpec& spec);
/// RK4 flow of the Jacobi moment ODE. Throws NumericalError if any moment
/// leaves [-1e-6, 1 + 1e-6].
MomentFlow jacobi_flow(const FlowSpec& spec, double dt = kDefaultFlowStep);
/// Dispatch on spec.model.
MomentFlow mean_field_flow(const FlowSpec& spec, double dt = kDefaultFlowStep);

/**
 * Moments h_n(t) of the companion one-dimensional process started from a
 * law with moments init_h:
 *   Gaussian:  xi + sigma b_t,             h_n' = sigma^2 n(n-1)/2 h_{n-2}
 *   Laguerre:  dY = sqrt(2 sigma Y) db + sigma (alpha + c) dt,
 *                                          h_n' = sigma n (alpha + c + n - 1) h_{n-1}
 *   Jacobi:    dY = sqrt(2Y(1-Y)) db + (a+c+1 - (a+b+2c+2) Y) dt,
 *              h_n' = n (a+c+n) h_{n-1} - n (a+b+2c+n+1) h_n
 * Gaussian and Laguerre come back as polynomials, Jacobi as exact
 * exponential sums.
 */
MomentFlow companion_flow(const FlowModel& model, double c, const MomentSequence& init_h,
                          std::size_t n_max, double horizon);

struct FlowCheckEntry {
  double t = 0.0;
  std::size_t n = 0;
  double transformed = 0.0;  // mkt of the mean-field moments
  double companion = 0.0;    // companion moment h_n(t)
  double residual = 0.0;     // |difference| / max(1, |companion|)
};

struct FlowCheckReport {
  std::vector<FlowCheckEntry> entries;
  double max_residual = 0.0;
  double tolerance = 0.0;
  /// Jacobi only: max |m(dt) - m(dt/2)| over the check times.
  double richardson = 0.0;
  bool passed = false;
};

/// For every t in t_grid compares mkt(m(t), c) with the companion moments
/// started from mkt(init, c).
FlowCheckReport flow_mkt_check(const FlowSpec& spec, std::span<const double> t_grid, double tol,
                               double dt = kDefaultFlowStep);

/// K = sqrt(max(sigma^2 (c+1) T, 2 Lambda^2)).
double growth_envelope_bound(double sigma, double c, double horizon, double lambda);

struct GrowthEnvelope {
  double envelope = 0.0;  // max_n max_t |m_n(t)|^(1/n) / n
  double bound = 0.0;     // K
  bool passed = false;
};

/// Envelope of a Gaussian flow over [0, T] (sampled on 2001 points plus
/// the endpoints) against K. `lambda` must bound the initial moments.
GrowthEnvelope growth_envelope_check(const FlowSpec& spec, const MomentFlow& flow, double lambda);

}  // namespace mkt
