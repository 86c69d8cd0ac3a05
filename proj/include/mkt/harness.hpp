#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mkt/ensembles.hpp"
#include "mkt/flows.hpp"
#include "mkt/moments.hpp"
#include "mkt/sde.hpp"

namespace mkt {

inline constexpr int kReportSchemaVersion = 1;

struct CheckRecord {
  std::string name;
  double statistic = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  nlohmann::json detail = nlohmann::json::object();
};

/// Result of one experiment. `parameters` is enough to rerun it through
/// run_experiment; `wall_time_seconds` is the only field that is not
/// reproduced bit for bit.
struct VerificationReport {
  std::string experiment;
  nlohmann::json parameters = nlohmann::json::object();
  std::vector<std::uint64_t> seeds;
  std::vector<CheckRecord> checks;
  double wall_time_seconds = 0.0;

  bool passed() const;
  void add(CheckRecord r) { checks.push_back(std::move(r)); }
  nlohmann::json to_json() const;
  static VerificationReport from_json(const nlohmann::json& j);
};

struct Theorem1Params {
  EnsembleSpec ensemble = EnsembleSpec::gaussian(200, 1.0);
  std::size_t reps = 10000;
  std::vector<std::complex<double>> z_grid = {{0.0, 2.0}, {1.0, 1.0}, {-1.0, 2.0}};
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  bool run_limit = true;
  std::size_t limit_n = 400;
  std::size_t limit_reps = 200;
  std::size_t limit_n_max = 6;

  nlohmann::json to_json() const;
  static Theorem1Params from_json(const nlohmann::json& j);
};

/// Law whose inverse transform is the N -> infinity limit of the empirical
/// measure: N(0,1), Gamma(alpha + c, 1) or Beta(a + c + 1, b + c + 1).
ReferenceLaw limit_reference_law(const EnsembleSpec& spec);

/**
 * Finite-N identity E (z - a_1)^(-c) = E exp(-c <L_N, log(z - x)>) per z
 * (real and imaginary parts, 4 combined standard errors), the exact mean of
 * a_1, and the limit of the averaged empirical moments against the inverse
 * transform of the reference law (4 standard errors plus 2 c n^2 / N).
 */
VerificationReport verify_theorem1(const Theorem1Params& p);

struct FlowMktParams {
  FlowModel model = GaussianDynamics{};
  double c = 1.0;
  MomentSequence init = MomentSequence::delta(8);
  std::size_t n_max = 8;
  std::vector<double> t_grid = {0.25, 0.5, 1.0, 2.0};
  double tolerance = 1e-9;
  double dt = kDefaultFlowStep;
  double richardson_tolerance = 1e-7;  // Jacobi only
  /// Optional particle cross-check at (sde_t, sde_n); needs a point-mass init.
  bool sde_cross_check = false;
  std::size_t sde_n = 100;
  std::size_t sde_reps = 200;
  double sde_dt = 1e-3;
  double sde_t = 0.5;
  std::size_t sde_order = 2;
  double sde_bias_budget = 0.05;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;

  nlohmann::json to_json() const;
  static FlowMktParams from_json(const nlohmann::json& j);
};

VerificationReport verify_flow_mkt(const FlowMktParams& p);

/// Monte Carlo moments of the companion diffusion from a point start against
/// the companion moment ODE.
struct CompanionGateParams {
  FlowModel model = JacobiDynamics{};
  double c = 1.0;
  double start = 0.0;
  std::size_t paths = 100000;
  double dt = 1e-4;
  double t = 0.5;
  std::size_t n_max = 3;
  double z_limit = 4.0;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;

  nlohmann::json to_json() const;
  static CompanionGateParams from_json(const nlohmann::json& j);
};

VerificationReport verify_companion(const CompanionGateParams& p);

struct LocalScalingParams {
  SdeModel base = SdeModel::laguerre;
  ScalingRegime regime = ScalingRegime::gaussian;
  std::vector<std::size_t> n_list = {50, 100, 200};
  double c = 1.0;
  double sigma = 1.0;  // target noise scale
  double alpha = 2.0;  // Laguerre base
  double a = 0.0;      // Jacobi base
  double b = 0.0;
  double dt = 1e-3;
  double t = 1.0;
  std::size_t reps = 100;
  std::size_t n_max = 2;
  double budget = 0.1;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;

  nlohmann::json to_json() const;
  static LocalScalingParams from_json(const nlohmann::json& j);
};

/// Mean-field flow the rescaled process converges to, started at delta_0.
FlowSpec local_scaling_target(const LocalScalingParams& p);

/// Residual |mean S_n(t) - m_n(t)| per N for the canonical scaling; checks
/// that the last residual is not larger than the first beyond 4 combined
/// standard errors and that it ends below the budget.
VerificationReport verify_local_scaling(const LocalScalingParams& p);

/// Reruns an experiment from a report (or from {"experiment", "parameters"}).
VerificationReport run_experiment(const nlohmann::json& spec);

nlohmann::json flow_model_to_json(const FlowModel& m);
FlowModel flow_model_from_json(const nlohmann::json& j);

}  // namespace mkt
