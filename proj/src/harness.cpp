#include "mkt/harness.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "mkt/errors.hpp"
#include "mkt/moments.hpp"
#include "mkt/parallel.hpp"

namespace mkt {

using nlohmann::json;

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  MeanSe r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return r;
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return r;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string z_label(std::complex<double> z) {
  std::ostringstream s;
  s << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return s.str();
}

json ensemble_to_json(const EnsembleSpec& e) {
  return {{"model", to_string(e.model)}, {"n", e.n}, {"c", e.c}, {"alpha", e.alpha}, {"a", e.a}, {"b", e.b}};
}

EnsembleSpec ensemble_from_json(const json& j) {
  EnsembleSpec e;
  e.model = parse_ensemble_model(j.at("model").get<std::string>());
  e.n = j.at("n").get<std::size_t>();
  e.c = j.at("c").get<double>();
  e.alpha = j.value("alpha", 1.0);
  e.a = j.value("a", 0.0);
  e.b = j.value("b", 0.0);
  return e;
}

SdeModel sde_model_for(const FlowModel& m) {
  if (std::holds_alternative<GaussianDynamics>(m)) return SdeModel::dyson;
  if (std::holds_alternative<LaguerreDynamics>(m)) return SdeModel::laguerre;
  return SdeModel::jacobi;
}

}  // namespace

bool VerificationReport::passed() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

json VerificationReport::to_json() const {
  json checks_json = json::array();
  for (const auto& c : checks)
    checks_json.push_back({{"name", c.name},
                           {"statistic", c.statistic},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass},
                           {"detail", c.detail}});
  return {{"schema_version", kReportSchemaVersion},
          {"experiment", experiment},
          {"parameters", parameters},
          {"seeds", seeds},
          {"checks", checks_json},
          {"pass", passed()},
          {"wall_time_seconds", wall_time_seconds}};
}

VerificationReport VerificationReport::from_json(const json& j) {
  if (j.at("schema_version").get<int>() != kReportSchemaVersion)
    throw ParameterError("report: unsupported schema_version");
  VerificationReport r;
  r.experiment = j.at("experiment").get<std::string>();
  r.parameters = j.at("parameters");
  r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  for (const auto& c : j.at("checks"))
    r.checks.push_back({c.at("name").get<std::string>(), c.at("statistic").get<double>(),
                        c.at("tolerance").get<double>(), c.at("pass").get<bool>(), c.value("detail", json::object())});
  r.wall_time_seconds = j.value("wall_time_seconds", 0.0);
  return r;
}

json flow_model_to_json(const FlowModel& m) {
  if (const auto* g = std::get_if<GaussianDynamics>(&m)) return {{"name", "gaussian"}, {"sigma", g->sigma}};
  if (const auto* l = std::get_if<LaguerreDynamics>(&m))
    return {{"name", "laguerre"}, {"alpha", l->alpha}, {"sigma", l->sigma}};
  const auto& jd = std::get<JacobiDynamics>(m);
  return {{"name", "jacobi"}, {"a", jd.a}, {"b", jd.b}};
}

FlowModel flow_model_from_json(const json& j) {
  const auto name = j.at("name").get<std::string>();
  if (name == "gaussian") return GaussianDynamics{j.value("sigma", 1.0)};
  if (name == "laguerre") return LaguerreDynamics{j.value("alpha", 1.0), j.value("sigma", 1.0)};
  if (name == "jacobi") return JacobiDynamics{j.value("a", 0.0), j.value("b", 0.0)};
  throw ParameterError("unknown flow model '" + name + "'");
}

// ---------------------------------------------------------------- finite-N identity and limit

json Theorem1Params::to_json() const {
  json z = json::array();
  for (auto v : z_grid) z.push_back({v.real(), v.imag()});
  return {{"ensemble", ensemble_to_json(ensemble)},
          {"reps", reps},
          {"z_grid", z},
          {"seed", seed},
          {"threads", threads},
          {"run_limit", run_limit},
          {"limit_n", limit_n},
          {"limit_reps", limit_reps},
          {"limit_n_max", limit_n_max}};
}

Theorem1Params Theorem1Params::from_json(const json& j) {
  Theorem1Params p;
  p.ensemble = ensemble_from_json(j.at("ensemble"));
  p.reps = j.value("reps", p.reps);
  if (j.contains("z_grid")) {
    p.z_grid.clear();
    for (const auto& z : j.at("z_grid")) p.z_grid.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  }
  p.seed = j.value("seed", p.seed);
  p.threads = j.value("threads", p.threads);
  p.run_limit = j.value("run_limit", p.run_limit);
  p.limit_n = j.value("limit_n", p.limit_n);
  p.limit_reps = j.value("limit_reps", p.limit_reps);
  p.limit_n_max = j.value("limit_n_max", p.limit_n_max);
  return p;
}

ReferenceLaw limit_reference_law(const EnsembleSpec& spec) {
  switch (spec.model) {
    case EnsembleModel::gaussian: return GaussianLaw{1.0};
    case EnsembleModel::laguerre: return GammaLaw{spec.alpha + spec.c, 1.0};
    case EnsembleModel::jacobi: break;
  }
  return BetaLaw{spec.a + spec.c + 1.0, spec.b + spec.c + 1.0};
}

namespace {

// Exact mean of the (1,1) entry at finite N.
double first_entry_mean(const EnsembleSpec& s) {
  const double k = s.c * static_cast<double>(s.n - 1) / static_cast<double>(s.n);
  switch (s.model) {
    case EnsembleModel::gaussian: return 0.0;
    case EnsembleModel::laguerre: return s.alpha + k;
    case EnsembleModel::jacobi: break;
  }
  return (k + s.a + 1.0) / (2.0 * k + s.a + s.b + 2.0);
}

constexpr std::uint64_t kLimitStreamOffset = std::uint64_t{1} << 40;

}  // namespace

VerificationReport verify_theorem1(const Theorem1Params& p) {
  Stopwatch clock;
  p.ensemble.validate();
  require(p.reps >= 2, "theorem1: reps must be >= 2");
  for (auto z : p.z_grid) require(z.imag() != 0.0, "theorem1: z must be off the real axis");

  VerificationReport report;
  report.experiment = "theorem1";
  report.parameters = p.to_json();
  report.seeds = {p.seed};

  const double c = p.ensemble.c;
  const std::size_t nz = p.z_grid.size();
  // Per replica: a_1 and, per z, (lhs, rhs).
  std::vector<double> a1(p.reps);
  std::vector<std::complex<double>> lhs(p.reps * nz), rhs(p.reps * nz);
  parallel_for(p.reps, p.threads, [&](std::size_t r) {
    RandomStream s(p.seed, r);
    const TridiagonalMatrix t = build_matrix(p.ensemble, s);
    const TridiagEigen eig = tridiag_eigen(t);
    a1[r] = t.diag[0];
    const double inv_n = 1.0 / static_cast<double>(t.size());
    for (std::size_t k = 0; k < nz; ++k) {
      const auto z = p.z_grid[k];
      lhs[r * nz + k] = std::exp(-c * principal_log(z - a1[r]));
      std::complex<double> pot = 0.0;
      for (double x : eig.eigenvalues) pot += principal_log(z - x);
      rhs[r * nz + k] = std::exp(-c * pot * inv_n);
    }
  });

  for (std::size_t k = 0; k < nz; ++k) {
    std::vector<double> lr(p.reps), li(p.reps), rr(p.reps), ri(p.reps), dr(p.reps), di(p.reps);
    for (std::size_t r = 0; r < p.reps; ++r) {
      const auto l = lhs[r * nz + k], q = rhs[r * nz + k];
      lr[r] = l.real();
      li[r] = l.imag();
      rr[r] = q.real();
      ri[r] = q.imag();
      dr[r] = lr[r] - rr[r];
      di[r] = li[r] - ri[r];
    }
    const MeanSe Lr = mean_se(lr), Li = mean_se(li), Rr = mean_se(rr), Ri = mean_se(ri);
    const MeanSe Dr = mean_se(dr), Di = mean_se(di);
    const double se_r = std::hypot(Lr.se, Rr.se), se_i = std::hypot(Li.se, Ri.se);
    const double zr = se_r > 0.0 ? std::fabs(Lr.mean - Rr.mean) / se_r : 0.0;
    const double zi = se_i > 0.0 ? std::fabs(Li.mean - Ri.mean) / se_i : 0.0;
    CheckRecord rec;
    rec.name = "finite_n_identity z=" + z_label(p.z_grid[k]);
    rec.statistic = std::max(zr, zi);
    rec.tolerance = 4.0;
    rec.pass = rec.statistic <= rec.tolerance;
    rec.detail = {{"lhs", {Lr.mean, Li.mean}},
                  {"rhs", {Rr.mean, Ri.mean}},
                  {"combined_stderr", {se_r, se_i}},
                  {"paired_stderr", {Dr.se, Di.se}}};
    report.add(rec);
  }

  {
    const MeanSe m = mean_se(a1);
    const double expected = first_entry_mean(p.ensemble);
    CheckRecord rec;
    rec.name = "first_entry_mean";
    rec.statistic = m.se > 0.0 ? std::fabs(m.mean - expected) / m.se : 0.0;
    rec.tolerance = 4.0;
    rec.pass = rec.statistic <= rec.tolerance;
    rec.detail = {{"mean", m.mean}, {"expected", expected}, {"stderr", m.se}};
    report.add(rec);
  }

  if (p.run_limit) {
    require(p.limit_reps >= 2 && p.limit_n >= 1, "theorem1: limit check needs reps >= 2, N >= 1");
    EnsembleSpec big = p.ensemble;
    big.n = p.limit_n;
    const std::size_t nm = p.limit_n_max;
    std::vector<std::vector<double>> s(p.limit_reps);
    parallel_for(p.limit_reps, p.threads, [&](std::size_t r) {
      RandomStream rs(p.seed, kLimitStreamOffset + r);
      const TridiagEigen eig = tridiag_eigen(build_matrix(big, rs));
      s[r] = power_means(eig.eigenvalues, nm);
    });
    const MomentSequence target = imkt_moments(reference_moments(limit_reference_law(big), nm), c);
    for (std::size_t n = 1; n <= nm; ++n) {
      std::vector<double> col(p.limit_reps);
      for (std::size_t r = 0; r < p.limit_reps; ++r) col[r] = s[r][n];
      const MeanSe m = mean_se(col);
      const double allowance = 2.0 * c * static_cast<double>(n * n) / static_cast<double>(big.n);
      CheckRecord rec;
      rec.name = "limit_moment n=" + std::to_string(n);
      rec.statistic = std::fabs(m.mean - target[n]);
      rec.tolerance = 4.0 * m.se + allowance;
      rec.pass = rec.statistic <= rec.tolerance;
      rec.detail = {{"mean", m.mean}, {"target", target[n]}, {"stderr", m.se}, {"finite_size_allowance", allowance}};
      report.add(rec);
    }
  }
  report.wall_time_seconds = clock.seconds();
  return report;
}

// ---------------------------------------------------------------- flow / MKT

json FlowMktParams::to_json() const {
  return {{"model", flow_model_to_json(model)},
          {"c", c},
          {"init", init.vector()},
          {"n_max", n_max},
          {"t_grid", t_grid},
          {"tolerance", tolerance},
          {"dt", dt},
          {"richardson_tolerance", richardson_tolerance},
          {"sde_cross_check", sde_cross_check},
          {"sde_n", sde_n},
          {"sde_reps", sde_reps},
          {"sde_dt", sde_dt},
          {"sde_t", sde_t},
          {"sde_order", sde_order},
          {"sde_bias_budget", sde_bias_budget},
          {"seed", seed},
          {"threads", threads}};
}

FlowMktParams FlowMktParams::from_json(const json& j) {
  FlowMktParams p;
  p.model = flow_model_from_json(j.at("model"));
  p.c = j.at("c").get<double>();
  p.init = MomentSequence(j.at("init").get<std::vector<double>>());
  p.n_max = j.value("n_max", p.n_max);
  p.t_grid = j.value("t_grid", p.t_grid);
  p.tolerance = j.value("tolerance", p.tolerance);
  p.dt = j.value("dt", p.dt);
  p.richardson_tolerance = j.value("richardson_tolerance", p.richardson_tolerance);
  p.sde_cross_check = j.value("sde_cross_check", p.sde_cross_check);
  p.sde_n = j.value("sde_n", p.sde_n);
  p.sde_reps = j.value("sde_reps", p.sde_reps);
  p.sde_dt = j.value("sde_dt", p.sde_dt);
  p.sde_t = j.value("sde_t", p.sde_t);
  p.sde_order = j.value("sde_order", p.sde_order);
  p.sde_bias_budget = j.value("sde_bias_budget", p.sde_bias_budget);
  p.seed = j.value("seed", p.seed);
  p.threads = j.value("threads", p.threads);
  return p;
}

VerificationReport verify_flow_mkt(const FlowMktParams& p) {
  Stopwatch clock;
  VerificationReport report;
  report.experiment = "flow-mkt";
  report.parameters = p.to_json();
  report.seeds = {p.seed};

  double horizon = 0.0;
  for (double t : p.t_grid) horizon = std::max(horizon, t);
  if (p.sde_cross_check) horizon = std::max(horizon, p.sde_t);
  const FlowSpec spec{p.model, p.c, p.init, p.n_max, horizon};
  const FlowCheckReport fc = flow_mkt_check(spec, p.t_grid, p.tolerance, p.dt);

  CheckRecord main;
  main.name = "flow_mkt_intertwining";
  main.statistic = fc.max_residual;
  main.tolerance = p.tolerance;
  main.pass = fc.passed;
  json entries = json::array();
  for (const auto& e : fc.entries)
    entries.push_back({{"t", e.t}, {"n", e.n}, {"transformed", e.transformed}, {"companion", e.companion},
                       {"residual", e.residual}});
  main.detail = {{"entries", entries}};
  report.add(main);

  if (std::holds_alternative<JacobiDynamics>(p.model)) {
    CheckRecord rich;
    rich.name = "rk4_step_halving";
    rich.statistic = fc.richardson;
    rich.tolerance = p.richardson_tolerance;
    rich.pass = fc.richardson <= p.richardson_tolerance;
    rich.detail = {{"dt", p.dt}};
    report.add(rich);
  }

  if (p.sde_cross_check) {
    const double start = p.init[1];
    require(p.init.n_max() >= 2 && std::fabs(p.init[2] - start * start) <= 1e-12 * std::max(1.0, start * start),
            "flow-mkt: the particle cross-check needs a point-mass initial law");
    const SdeModel sm = sde_model_for(p.model);
    SimConfig cfg;
    cfg.n = p.sde_n;
    cfg.c = p.c;
    if (const auto* g = std::get_if<GaussianDynamics>(&p.model)) cfg.sigma = g->sigma;
    if (const auto* l = std::get_if<LaguerreDynamics>(&p.model)) {
      cfg.sigma = l->sigma;
      cfg.alpha = l->alpha;
    }
    if (const auto* jd = std::get_if<JacobiDynamics>(&p.model)) {
      cfg.a = jd->a;
      cfg.b = jd->b;
    }
    cfg.dt = p.sde_dt;
    cfg.horizon = p.sde_t;
    cfg.reps = p.sde_reps;
    cfg.seed = p.seed;
    cfg.threads = p.threads;
    cfg.init_location = start;
    const MomentEstimates est = estimate_moments(sm, cfg, p.sde_order);
    const MomentFlow flow = mean_field_flow(spec, p.dt);
    const double m = flow.value(p.sde_order, p.sde_t);
    const double mean = est.mean_at(p.sde_t, p.sde_order), se = est.stderr_at(p.sde_t, p.sde_order);
    CheckRecord rec;
    rec.name = "particle_cross_check n=" + std::to_string(p.sde_order);
    rec.statistic = std::fabs(mean - m);
    rec.tolerance = 4.0 * se + p.sde_bias_budget;
    rec.pass = rec.statistic <= rec.tolerance;
    rec.detail = {{"mean", mean}, {"flow", m}, {"stderr", se}, {"reflection_fraction", est.reflection_fraction}};
    report.add(rec);
  }
  report.wall_time_seconds = clock.seconds();
  return report;
}

// ---------------------------------------------------------------- companion

json CompanionGateParams::to_json() const {
  return {{"model", flow_model_to_json(model)}, {"c", c}, {"start", start}, {"paths", paths}, {"dt", dt},
          {"t", t}, {"n_max", n_max}, {"z_limit", z_limit}, {"seed", seed}, {"threads", threads}};
}

CompanionGateParams CompanionGateParams::from_json(const json& j) {
  CompanionGateParams p;
  p.model = flow_model_from_json(j.at("model"));
  p.c = j.at("c").get<double>();
  p.start = j.value("start", p.start);
  p.paths = j.value("paths", p.paths);
  p.dt = j.value("dt", p.dt);
  p.t = j.value("t", p.t);
  p.n_max = j.value("n_max", p.n_max);
  p.z_limit = j.value("z_limit", p.z_limit);
  p.seed = j.value("seed", p.seed);
  p.threads = j.value("threads", p.threads);
  return p;
}

VerificationReport verify_companion(const CompanionGateParams& p) {
  Stopwatch clock;
  VerificationReport report;
  report.experiment = "companion";
  report.parameters = p.to_json();
  report.seeds = {p.seed};

  CompanionConfig cfg;
  cfg.c = p.c;
  cfg.dt = p.dt;
  cfg.horizon = p.t;
  cfg.paths = p.paths;
  cfg.seed = p.seed;
  cfg.threads = p.threads;
  const MomentEstimates est = simulate_companion(p.model, AtomicMeasure::point(p.start), cfg, p.n_max);
  const MomentFlow exact =
      companion_flow(p.model, p.c, MomentSequence::delta(p.n_max, p.start), p.n_max, p.t);
  for (std::size_t n = 1; n <= p.n_max; ++n) {
    const double mean = est.mean_at(p.t, n), se = est.stderr_at(p.t, n), h = exact.value(n, p.t);
    CheckRecord rec;
    rec.name = "companion_moment n=" + std::to_string(n);
    rec.statistic = se > 0.0 ? std::fabs(mean - h) / se : std::fabs(mean - h);
    rec.tolerance = p.z_limit;
    rec.pass = rec.statistic <= rec.tolerance;
    rec.detail = {{"mc_mean", mean}, {"ode", h}, {"stderr", se}, {"reflection_fraction", est.reflection_fraction}};
    report.add(rec);
  }
  report.wall_time_seconds = clock.seconds();
  return report;
}

// ---------------------------------------------------------------- local scaling

json LocalScalingParams::to_json() const {
  return {{"base", to_string(base)}, {"regime", to_string(regime)}, {"n_list", n_list}, {"c", c},
          {"sigma", sigma}, {"alpha", alpha}, {"a", a}, {"b", b}, {"dt", dt}, {"t", t}, {"reps", reps},
          {"n_max", n_max}, {"budget", budget}, {"seed", seed}, {"threads", threads}};
}

LocalScalingParams LocalScalingParams::from_json(const json& j) {
  LocalScalingParams p;
  p.base = parse_sde_model(j.at("base").get<std::string>());
  p.regime = parse_scaling_regime(j.at("regime").get<std::string>());
  p.n_list = j.value("n_list", p.n_list);
  p.c = j.value("c", p.c);
  p.sigma = j.value("sigma", p.sigma);
  p.alpha = j.value("alpha", p.alpha);
  p.a = j.value("a", p.a);
  p.b = j.value("b", p.b);
  p.dt = j.value("dt", p.dt);
  p.t = j.value("t", p.t);
  p.reps = j.value("reps", p.reps);
  p.n_max = j.value("n_max", p.n_max);
  p.budget = j.value("budget", p.budget);
  p.seed = j.value("seed", p.seed);
  p.threads = j.value("threads", p.threads);
  return p;
}

FlowSpec local_scaling_target(const LocalScalingParams& p) {
  FlowSpec spec;
  spec.c = p.c;
  spec.n_max = p.n_max;
  spec.init = MomentSequence::delta(p.n_max);
  spec.horizon = p.t;
  if (p.regime == ScalingRegime::gaussian)
    spec.model = GaussianDynamics{p.sigma};
  else
    spec.model = LaguerreDynamics{p.a + 1.0, p.sigma};
  return spec;
}

VerificationReport verify_local_scaling(const LocalScalingParams& p) {
  Stopwatch clock;
  require(p.n_list.size() >= 2, "local scaling: need at least two N values");
  require(p.reps >= 2, "local scaling: reps must be >= 2");
  VerificationReport report;
  report.experiment = "local-scaling";
  report.parameters = p.to_json();

  const FlowSpec target_spec = local_scaling_target(p);
  const MomentFlow target = mean_field_flow(target_spec);

  std::vector<std::vector<double>> residual(p.n_list.size()), stderr_(p.n_list.size());
  json per_n = json::array();
  for (std::size_t k = 0; k < p.n_list.size(); ++k) {
    const std::size_t n = p.n_list[k];
    const ScalingSpec scaling = canonical_scaling(p.base, p.regime, n, p.sigma);
    SimConfig cfg;
    cfg.n = n;
    cfg.c = p.c;
    cfg.sigma = 1.0;
    cfg.alpha = p.alpha;
    cfg.a = p.a;
    cfg.b = p.b;
    cfg.dt = p.dt;
    cfg.horizon = p.t;
    cfg.reps = p.reps;
    cfg.seed = p.seed + k;
    cfg.threads = p.threads;
    report.seeds.push_back(cfg.seed);
    const MomentEstimates est = estimate_local_scaling_moments(p.base, scaling, p.regime, cfg, p.n_max);
    json row = {{"N", n}, {"gamma", scaling.gamma}, {"tau", scaling.tau}, {"E", scaling.E}};
    for (std::size_t m = 1; m <= p.n_max; ++m) {
      const double mean = est.mean_at(p.t, m), se = est.stderr_at(p.t, m);
      residual[k].push_back(std::fabs(mean - target.value(m, p.t)));
      stderr_[k].push_back(se);
      row["S_" + std::to_string(m)] = mean;
      row["stderr_" + std::to_string(m)] = se;
      row["residual_" + std::to_string(m)] = residual[k].back();
    }
    per_n.push_back(row);
  }

  const std::size_t last = p.n_list.size() - 1;
  for (std::size_t m = 0; m < p.n_max; ++m) {
    const double noise = 4.0 * std::hypot(stderr_[0][m], stderr_[last][m]);
    CheckRecord dec;
    dec.name = "residual_not_increasing n=" + std::to_string(m + 1);
    dec.statistic = residual[last][m] - residual[0][m];
    dec.tolerance = noise;
    dec.pass = dec.statistic <= dec.tolerance;
    dec.detail = {{"first", residual[0][m]}, {"last", residual[last][m]}};
    report.add(dec);
  }
  double worst = 0.0;
  for (double r : residual[last]) worst = std::max(worst, r);
  CheckRecord fin;
  fin.name = "final_residual";
  fin.statistic = worst;
  fin.tolerance = p.budget;
  fin.pass = worst < p.budget;
  fin.detail = {{"per_N", per_n}, {"target", model_name(target_spec.model)}};
  report.add(fin);
  report.wall_time_seconds = clock.seconds();
  return report;
}

VerificationReport run_experiment(const json& spec) {
  const auto name = spec.at("experiment").get<std::string>();
  const json& params = spec.at("parameters");
  if (name == "theorem1") return verify_theorem1(Theorem1Params::from_json(params));
  if (name == "flow-mkt") return verify_flow_mkt(FlowMktParams::from_json(params));
  if (name == "companion") return verify_companion(CompanionGateParams::from_json(params));
  if (name == "local-scaling") return verify_local_scaling(LocalScalingParams::from_json(params));
  throw ParameterError("unknown experiment '" + name + "'");
}

}  // namespace mkt
