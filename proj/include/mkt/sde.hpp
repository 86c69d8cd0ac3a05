#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mkt/flows.hpp"
#include "mkt/measure.hpp"
#include "mkt/moment_sequence.hpp"
#include "mkt/rng.hpp"

namespace mkt {

enum class SdeModel { dyson, laguerre, jacobi };

std::string to_string(SdeModel m);
SdeModel parse_sde_model(const std::string& name);

inline constexpr double kDefaultDeltaMin = 1e-8;
inline constexpr double kBlowUpLevel = 1e6;

/**
 * Particle system parameters.
 *
 *   dyson:    dx_i = sigma db_i + sigma^2 (c/N) sum_j 1/(x_i - x_j) dt
 *   laguerre: dx_i = sqrt(2 sigma x_i) db_i + sigma alpha dt + sigma (c/N) sum_j 2 x_i/(x_i - x_j) dt
 *   jacobi:   dx_i = sqrt(2 x_i (1 - x_i)) db_i
 *                    + (a + 1 - (a+b+2) x_i + (c/N) sum_j 2 x_i (1-x_i)/(x_i - x_j)) dt
 *
 * Initial positions come from `init` when non-empty (size n, any order),
 * otherwise every particle starts at `init_location`.
 */
struct SimConfig {
  std::size_t n = 1;
  double c = 1.0;
  double sigma = 1.0;
  double alpha = 1.0;
  double a = 0.0;
  double b = 0.0;
  double dt = 1e-3;
  double horizon = 1.0;
  std::size_t reps = 1;
  std::uint64_t seed = kDefaultSeed;
  double delta_min = kDefaultDeltaMin;
  std::vector<double> init;
  double init_location = 0.0;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate(SdeModel model) const;
  std::vector<double> initial_positions() const;
  /// dt <= delta_min^2 / (4 c sigma^2). Reported only; the pair kernel below
  /// scales its collision radius with dt instead.
  bool satisfies_fixed_floor_heuristic() const;
};

/// Number of Euler steps for a horizon; the step actually used is T / steps.
std::size_t step_count(double horizon, double dt);
/// Storage stride max(1, floor(0.01 / dt)).
std::size_t storage_stride(double dt);

struct ParticlePath {
  std::vector<double> times;
  std::vector<std::vector<double>> positions;  // [time][particle], sorted
  std::size_t reflections = 0;                 // particle-steps that hit a wall
  std::size_t particle_steps = 0;

  double reflection_fraction() const {
    return particle_steps == 0 ? 0.0 : static_cast<double>(reflections) / static_cast<double>(particle_steps);
  }
};

/// One replica; its randomness is RandomStream(cfg.seed, rep).
ParticlePath simulate_dyson(const SimConfig& cfg, std::uint64_t rep = 0);
ParticlePath simulate_laguerre(const SimConfig& cfg, std::uint64_t rep = 0);
ParticlePath simulate_jacobi(const SimConfig& cfg, std::uint64_t rep = 0);
ParticlePath simulate(SdeModel model, const SimConfig& cfg, std::uint64_t rep = 0);

/// S_n(t) = (1/N) sum_i x_i(t)^n for every stored time.
std::vector<MomentSequence> empirical_moment_paths(const ParticlePath& path, std::size_t n_max);

/// Replica averages of a scalar-per-order process on a common time grid.
struct MomentEstimates {
  std::vector<double> times;
  std::vector<std::vector<double>> mean;      // [time][n]
  std::vector<std::vector<double>> variance;  // sample variance across replicas
  std::vector<std::vector<double>> stderr_;   // sqrt(variance / reps)
  std::size_t reps = 0;
  double reflection_fraction = 0.0;

  /// Index of the stored time closest to t; throws if none is within half a
  /// storage interval.
  std::size_t index_of(double t) const;
  double mean_at(double t, std::size_t n) const { return mean[index_of(t)][n]; }
  double stderr_at(double t, std::size_t n) const { return stderr_[index_of(t)][n]; }
};

/// Runs cfg.reps replicas in parallel and averages S_n(t), n = 0..n_max.
/// The result does not depend on the thread count.
MomentEstimates estimate_moments(SdeModel model, const SimConfig& cfg, std::size_t n_max);

/// Companion one-dimensional diffusions, driven by the same parameter
/// structs as the moment flows:
///   Gaussian: xi + sigma b_t
///   Laguerre: dY = sqrt(2 sigma Y) db + sigma (alpha + c) dt, reflected at 0
///   Jacobi:   dY = sqrt(2Y(1-Y)) db + (a + c + 1 - (a+b+2c+2) Y) dt, reflected in [0, 1]
struct CompanionConfig {
  double c = 1.0;
  double dt = 1e-3;
  double horizon = 1.0;
  std::size_t paths = 10000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
};

/// Y_0 is drawn from `init` (use AtomicMeasure::point for a fixed start).
MomentEstimates simulate_companion(const FlowModel& model, const AtomicMeasure& init,
                                   const CompanionConfig& cfg, std::size_t n_max);

/// x(t) = gamma (lambda(t / tau) - E).
struct ScalingSpec {
  double gamma = 1.0;
  double tau = 1.0;
  double E = 0.0;

  void validate() const;
};

enum class ScalingRegime { gaussian, laguerre };

std::string to_string(ScalingRegime r);
ScalingRegime parse_scaling_regime(const std::string& name);

/// Checks the regime's structural constraints (base/regime pairing, E range).
void validate_regime(SdeModel base, ScalingRegime regime, const ScalingSpec& s);

/// Limiting noise scale of the rescaled process:
///   laguerre -> gaussian: sqrt(2 gamma^2 E / tau)
///   jacobi   -> gaussian: sqrt(2 gamma^2 E (1 - E) / tau)
///   jacobi   -> laguerre: gamma / tau
double effective_sigma(SdeModel base, ScalingRegime regime, const ScalingSpec& s);

/// Scaling with tau = N^2 whose effective sigma equals `sigma`
/// (E = 1 for laguerre -> gaussian, 1/2 for jacobi -> gaussian, 0 for jacobi -> laguerre).
ScalingSpec canonical_scaling(SdeModel base, ScalingRegime regime, std::size_t n, double sigma);

/// Runs the base process at its native scale and returns the rescaled path.
/// `cfg` carries the base model parameters (alpha or a, b; base sigma) while
/// dt, horizon and the initial positions are in rescaled units: the native run
/// starts at E + x(0)/gamma with step dt/tau for horizon/tau.
ParticlePath simulate_local_scaling(SdeModel base, const ScalingSpec& scaling, ScalingRegime regime,
                                    const SimConfig& cfg, std::uint64_t rep = 0);

MomentEstimates estimate_local_scaling_moments(SdeModel base, const ScalingSpec& scaling,
                                               ScalingRegime regime, const SimConfig& cfg,
                                               std::size_t n_max);

/// Mean-field flow model matching a particle system.
FlowModel flow_model_of(SdeModel model, const SimConfig& cfg);

}  // namespace mkt
