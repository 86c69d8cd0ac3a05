#include "mkt/sde.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "mkt/errors.hpp"
#include "mkt/parallel.hpp"

namespace mkt {

std::string to_string(SdeModel m) {
  switch (m) {
    case SdeModel::dyson: return "dyson";
    case SdeModel::laguerre: return "laguerre";
    case SdeModel::jacobi: return "jacobi";
  }
  return "?";
}

SdeModel parse_sde_model(const std::string& name) {
  if (name == "dyson" || name == "gaussian") return SdeModel::dyson;
  if (name == "laguerre") return SdeModel::laguerre;
  if (name == "jacobi") return SdeModel::jacobi;
  throw ParameterError("unknown SDE model '" + name + "'");
}

std::string to_string(ScalingRegime r) { return r == ScalingRegime::gaussian ? "gaussian" : "laguerre"; }

ScalingRegime parse_scaling_regime(const std::string& name) {
  if (name == "gaussian") return ScalingRegime::gaussian;
  if (name == "laguerre") return ScalingRegime::laguerre;
  throw ParameterError("unknown scaling regime '" + name + "'");
}

namespace {

void validate_dynamics(SdeModel model, const SimConfig& cfg) {
  require(cfg.n >= 1, "simulation: N must be >= 1");
  require(cfg.c > 0.0 && std::isfinite(cfg.c), "simulation: c must be > 0");
  require(cfg.dt > 0.0 && std::isfinite(cfg.dt), "simulation: dt must be > 0");
  require(cfg.horizon > 0.0 && std::isfinite(cfg.horizon), "simulation: T must be > 0");
  require(cfg.reps >= 1, "simulation: reps must be >= 1");
  require(cfg.delta_min > 0.0, "simulation: delta_min must be > 0");
  require(cfg.init.empty() || cfg.init.size() == cfg.n, "simulation: init must hold N positions");
  switch (model) {
    case SdeModel::dyson: require(cfg.sigma > 0.0, "Dyson process: sigma must be > 0"); break;
    case SdeModel::laguerre:
      require(cfg.alpha > 0.5, "Laguerre process: alpha must be > 1/2");
      require(cfg.sigma > 0.0, "Laguerre process: sigma must be > 0");
      break;
    case SdeModel::jacobi:
      require(cfg.a > -0.5 && cfg.b > -0.5, "Jacobi process: a and b must be > -1/2");
      break;
  }
}

void validate_positions(SdeModel model, const std::vector<double>& x) {
  for (double v : x) {
    require(std::isfinite(v), "simulation: initial positions must be finite");
    if (model == SdeModel::laguerre) require(v >= 0.0, "Laguerre process: initial positions must be >= 0");
    if (model == SdeModel::jacobi)
      require(v >= 0.0 && v <= 1.0, "Jacobi process: initial positions must lie in [0, 1]");
  }
}

void insertion_sort(std::vector<double>& x) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double v = x[i];
    std::size_t j = i;
    while (j > 0 && x[j - 1] > v) {
      x[j] = x[j - 1];
      --j;
    }
    x[j] = v;
  }
}

// Pair interaction r / max(r^2, delta^2). The collision radius delta^2 =
// max(4 (c/N) h G, delta_min^2) grows with the step, where G is the mean
// squared diffusion coefficient of the pair; inside it the kernel is linear
// and vanishes at r = 0, so coincident particles (including a trivial start)
// feel no force.
struct Stepper {
  SdeModel model;
  std::size_t n;
  double c, sigma, alpha, a, b, delta_min;
  double h;

  double diffusion_sq(double x) const {
    switch (model) {
      case SdeModel::dyson: return sigma * sigma;
      case SdeModel::laguerre: return 2.0 * sigma * std::max(x, 0.0);
      case SdeModel::jacobi: return std::max(2.0 * x * (1.0 - x), 0.0);
    }
    return 0.0;
  }

  void drift(const std::vector<double>& x, std::vector<double>& g, std::vector<double>& d) const {
    const double cn = c / static_cast<double>(n);
    const double floor_sq = delta_min * delta_min;
    const double radius_factor = 4.0 * cn * h;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = diffusion_sq(x[i]);
      total += x[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      switch (model) {
        case SdeModel::dyson: d[i] = 0.0; break;
        case SdeModel::laguerre: d[i] = sigma * alpha + cn * sigma * static_cast<double>(n - 1); break;
        case SdeModel::jacobi:
          // sum_j (1 - x_i - x_j), the smooth part of the pair interaction
          d[i] = a + 1.0 - (a + b + 2.0) * x[i] +
                 cn * (static_cast<double>(n - 1) * (1.0 - x[i]) - (total - x[i]));
          break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double r = x[i] - x[j];
        const double pair = 0.5 * (g[i] + g[j]);
        const double radius_sq = std::max(radius_factor * pair, floor_sq);
        const double f = cn * pair * r / std::max(r * r, radius_sq);
        d[i] += f;
        d[j] -= f;
      }
    }
  }

  // Returns the number of particles that were reflected.
  std::size_t step(std::vector<double>& x, std::vector<double>& g, std::vector<double>& d,
                   RandomStream& rng) const {
    drift(x, g, d);
    const double sqrt_h = std::sqrt(h);
    std::size_t reflected = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double tamed = d[i] / (1.0 + h * std::fabs(d[i]));
      double y = x[i] + tamed * h + std::sqrt(g[i]) * sqrt_h * rng.normal();
      if (model == SdeModel::laguerre && y < 0.0) {
        y = -y;
        ++reflected;
      } else if (model == SdeModel::jacobi && (y < 0.0 || y > 1.0)) {
        ++reflected;
        for (int k = 0; k < 8 && (y < 0.0 || y > 1.0); ++k) y = y < 0.0 ? -y : 2.0 - y;
        y = std::clamp(y, 0.0, 1.0);
      }
      if (!(std::fabs(y) <= kBlowUpLevel)) {
        std::ostringstream msg;
        msg << to_string(model) << " process: particle left |x| <= 1e6 (value " << y
            << "); reduce dt";
        throw NumericalError(msg.str());
      }
      x[i] = y;
    }
    insertion_sort(x);
    return reflected;
  }
};

Stepper make_stepper(SdeModel model, const SimConfig& cfg, double h) {
  return {model, cfg.n, cfg.c, cfg.sigma, cfg.alpha, cfg.a, cfg.b, cfg.delta_min, h};
}

// Native-unit path: `steps` steps of size h, storing every `stride` steps and at the end.
ParticlePath run_particles(const Stepper& st, std::vector<double> x, std::size_t steps,
                           std::size_t stride, RandomStream& rng) {
  ParticlePath path;
  std::sort(x.begin(), x.end());
  path.times.push_back(0.0);
  path.positions.push_back(x);
  std::vector<double> g(st.n), d(st.n);
  for (std::size_t k = 1; k <= steps; ++k) {
    path.reflections += st.step(x, g, d, rng);
    path.particle_steps += st.n;
    if (k % stride == 0 || k == steps) {
      path.times.push_back(static_cast<double>(k) * st.h);
      path.positions.push_back(x);
    }
  }
  return path;
}

}  // namespace

void SimConfig::validate(SdeModel model) const {
  validate_dynamics(model, *this);
  validate_positions(model, initial_positions());
}

std::vector<double> SimConfig::initial_positions() const {
  std::vector<double> x = init.empty() ? std::vector<double>(n, init_location) : init;
  std::sort(x.begin(), x.end());
  return x;
}

bool SimConfig::satisfies_fixed_floor_heuristic() const {
  return dt <= delta_min * delta_min / (4.0 * c * sigma * sigma);
}

std::size_t step_count(double horizon, double dt) {
  const double ratio = horizon / dt;
  const double nearest = std::round(ratio);
  if (nearest >= 1.0 && std::fabs(ratio - nearest) <= 1e-9 * nearest) return static_cast<std::size_t>(nearest);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ratio)));
}

std::size_t storage_stride(double dt) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.01 / dt + 1e-9)));
}

ParticlePath simulate(SdeModel model, const SimConfig& cfg, std::uint64_t rep) {
  cfg.validate(model);
  const std::size_t steps = step_count(cfg.horizon, cfg.dt);
  const Stepper st = make_stepper(model, cfg, cfg.horizon / static_cast<double>(steps));
  RandomStream rng(cfg.seed, rep);
  return run_particles(st, cfg.initial_positions(), steps, storage_stride(cfg.dt), rng);
}

ParticlePath simulate_dyson(const SimConfig& cfg, std::uint64_t rep) { return simulate(SdeModel::dyson, cfg, rep); }
ParticlePath simulate_laguerre(const SimConfig& cfg, std::uint64_t rep) {
  return simulate(SdeModel::laguerre, cfg, rep);
}
ParticlePath simulate_jacobi(const SimConfig& cfg, std::uint64_t rep) { return simulate(SdeModel::jacobi, cfg, rep); }

std::vector<MomentSequence> empirical_moment_paths(const ParticlePath& path, std::size_t n_max) {
  std::vector<MomentSequence> out;
  out.reserve(path.positions.size());
  for (const auto& x : path.positions) out.emplace_back(power_means(x, n_max));
  return out;
}

std::size_t MomentEstimates::index_of(double t) const {
  if (times.empty()) throw ParameterError("moment estimates: no stored times");
  std::size_t best = 0;
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::fabs(times[k] - t) < std::fabs(times[best] - t)) best = k;
  const double spacing = times.size() > 1 ? times[1] - times[0] : 0.0;
  if (std::fabs(times[best] - t) > 0.5 * spacing + 1e-12 * std::max(1.0, std::fabs(t))) {
    std::ostringstream msg;
    msg << "moment estimates: time " << t << " is not on the stored grid";
    throw ParameterError(msg.str());
  }
  return best;
}

namespace {

// Welford accumulator over replicas for a [time][order] table; chunks are
// merged with Chan's formula in a fixed order.
struct Accumulator {
  std::size_t times = 0, orders = 0;
  double count = 0.0;
  std::vector<double> mean, m2;
  std::size_t reflections = 0, particle_steps = 0;

  Accumulator(std::size_t t, std::size_t o) : times(t), orders(o), mean(t * o, 0.0), m2(t * o, 0.0) {}

  void add(std::size_t time, std::size_t order, double v, double new_count) {
    const std::size_t k = time * orders + order;
    const double delta = v - mean[k];
    mean[k] += delta / new_count;
    m2[k] += delta * (v - mean[k]);
  }

  void merge(const Accumulator& o) {
    if (o.count == 0.0) return;
    const double total = count + o.count;
    for (std::size_t k = 0; k < mean.size(); ++k) {
      const double delta = o.mean[k] - mean[k];
      mean[k] += delta * o.count / total;
      m2[k] += o.m2[k] + delta * delta * count * o.count / total;
    }
    count = total;
    reflections += o.reflections;
    particle_steps += o.particle_steps;
  }

  MomentEstimates finish(std::vector<double> grid) const {
    MomentEstimates e;
    e.times = std::move(grid);
    e.reps = static_cast<std::size_t>(count);
    e.mean.assign(times, std::vector<double>(orders));
    e.variance = e.mean;
    e.stderr_ = e.mean;
    for (std::size_t t = 0; t < times; ++t)
      for (std::size_t n = 0; n < orders; ++n) {
        const std::size_t k = t * orders + n;
        e.mean[t][n] = mean[k];
        e.variance[t][n] = count > 1.0 ? m2[k] / (count - 1.0) : 0.0;
        e.stderr_[t][n] = count > 0.0 ? std::sqrt(e.variance[t][n] / count) : 0.0;
      }
    e.reflection_fraction =
        particle_steps == 0 ? 0.0 : static_cast<double>(reflections) / static_cast<double>(particle_steps);
    return e;
  }
};

constexpr std::size_t kParticleChunk = 4;
constexpr std::size_t kCompanionChunk = 1000;

template <class PathFn>
MomentEstimates estimate_from_paths(std::size_t reps, unsigned threads, std::size_t n_max, PathFn&& path_of) {
  const std::size_t chunks = (reps + kParticleChunk - 1) / kParticleChunk;
  std::vector<std::vector<double>> grids(chunks);
  std::vector<std::unique_ptr<Accumulator>> slots(chunks);
  parallel_for(chunks, threads, [&](std::size_t ch) {
    std::unique_ptr<Accumulator> acc;
    const std::size_t first = ch * kParticleChunk, last = std::min(reps, first + kParticleChunk);
    for (std::size_t r = first; r < last; ++r) {
      const ParticlePath path = path_of(r);
      if (!acc) {
        acc = std::make_unique<Accumulator>(path.times.size(), n_max + 1);
        grids[ch] = path.times;
      }
      acc->count += 1.0;
      for (std::size_t t = 0; t < path.positions.size(); ++t) {
        const auto s = power_means(path.positions[t], n_max);
        for (std::size_t n = 0; n <= n_max; ++n) acc->add(t, n, s[n], acc->count);
      }
      acc->reflections += path.reflections;
      acc->particle_steps += path.particle_steps;
    }
    slots[ch] = std::move(acc);
  });
  Accumulator total(slots.front()->times, n_max + 1);
  for (const auto& s : slots) total.merge(*s);
  return total.finish(grids.front());
}

}  // namespace

MomentEstimates estimate_moments(SdeModel model, const SimConfig& cfg, std::size_t n_max) {
  cfg.validate(model);
  return estimate_from_paths(cfg.reps, cfg.threads, n_max,
                             [&](std::size_t r) { return simulate(model, cfg, r); });
}

MomentEstimates simulate_companion(const FlowModel& model, const AtomicMeasure& init,
                                   const CompanionConfig& cfg, std::size_t n_max) {
  require(cfg.c > 0.0, "companion: c must be > 0");
  require(cfg.dt > 0.0 && cfg.horizon > 0.0, "companion: dt and T must be > 0");
  require(cfg.paths >= 1, "companion: paths must be >= 1");
  const auto* gd = std::get_if<GaussianDynamics>(&model);
  const auto* ld = std::get_if<LaguerreDynamics>(&model);
  const auto* jd = std::get_if<JacobiDynamics>(&model);
  if (gd) require(gd->sigma > 0.0, "Gaussian companion: sigma must be > 0");
  if (ld) {
    require(ld->sigma > 0.0 && ld->alpha > 0.0, "Laguerre companion: sigma, alpha must be > 0");
    for (double v : init.locations()) require(v >= 0.0, "Laguerre companion: init must live on [0, inf)");
  }
  if (jd) {
    require(jd->a > -1.0 && jd->b > -1.0, "Jacobi companion: a, b must be > -1");
    for (double v : init.locations())
      require(v >= 0.0 && v <= 1.0, "Jacobi companion: init must live on [0, 1]");
  }

  const std::size_t steps = step_count(cfg.horizon, cfg.dt);
  const double h = cfg.horizon / static_cast<double>(steps);
  const double sqrt_h = std::sqrt(h);
  const std::size_t stride = storage_stride(cfg.dt);
  std::vector<double> grid{0.0};
  for (std::size_t k = 1; k <= steps; ++k)
    if (k % stride == 0 || k == steps) grid.push_back(static_cast<double>(k) * h);

  std::vector<double> cumulative;
  double acc_w = 0.0;
  for (double w : init.weights()) cumulative.push_back(acc_w += w);

  const std::size_t chunks = (cfg.paths + kCompanionChunk - 1) / kCompanionChunk;
  std::vector<std::unique_ptr<Accumulator>> slots(chunks);
  parallel_for(chunks, cfg.threads, [&](std::size_t ch) {
    auto acc = std::make_unique<Accumulator>(grid.size(), n_max + 1);
    const std::size_t first = ch * kCompanionChunk, last = std::min(cfg.paths, first + kCompanionChunk);
    std::vector<double> powers(n_max + 1);
    for (std::size_t p = first; p < last; ++p) {
      RandomStream rng(cfg.seed, p);
      double y = init.locations()[0];
      if (init.size() > 1) {
        const double u = rng.uniform() * acc_w;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        y = init.locations()[std::min<std::size_t>(it - cumulative.begin(), init.size() - 1)];
      }
      acc->count += 1.0;
      auto record = [&](std::size_t slot) {
        double v = 1.0;
        for (std::size_t n = 0; n <= n_max; ++n, v *= y) acc->add(slot, n, v, acc->count);
      };
      record(0);
      std::size_t slot = 1;
      for (std::size_t k = 1; k <= steps; ++k) {
        const double z = rng.normal();
        if (gd) {
          y += gd->sigma * sqrt_h * z;
        } else if (ld) {
          y += ld->sigma * (ld->alpha + cfg.c) * h + std::sqrt(2.0 * ld->sigma * std::max(y, 0.0)) * sqrt_h * z;
          if (y < 0.0) {
            y = -y;
            ++acc->reflections;
          }
        } else {
          const double drift = jd->a + cfg.c + 1.0 - (jd->a + jd->b + 2.0 * cfg.c + 2.0) * y;
          y += drift * h + std::sqrt(std::max(2.0 * y * (1.0 - y), 0.0)) * sqrt_h * z;
          if (y < 0.0 || y > 1.0) {
            ++acc->reflections;
            for (int r = 0; r < 8 && (y < 0.0 || y > 1.0); ++r) y = y < 0.0 ? -y : 2.0 - y;
            y = std::clamp(y, 0.0, 1.0);
          }
        }
        if (!(std::fabs(y) <= kBlowUpLevel)) throw NumericalError("companion: path left |y| <= 1e6");
        if (k % stride == 0 || k == steps) record(slot++);
      }
      acc->particle_steps += steps;
    }
    slots[ch] = std::move(acc);
  });
  Accumulator total(grid.size(), n_max + 1);
  for (const auto& s : slots) total.merge(*s);
  return total.finish(std::move(grid));
}

void ScalingSpec::validate() const {
  require(gamma > 0.0 && std::isfinite(gamma), "scaling: gamma must be > 0");
  require(tau > 0.0 && std::isfinite(tau), "scaling: tau must be > 0");
  require(E >= 0.0 && std::isfinite(E), "scaling: E must be >= 0");
}

void validate_regime(SdeModel base, ScalingRegime regime, const ScalingSpec& s) {
  s.validate();
  require(base != SdeModel::dyson, "local scaling: base must be laguerre or jacobi");
  if (base == SdeModel::laguerre)
    require(regime == ScalingRegime::gaussian, "local scaling: a Laguerre base only scales to gaussian");
  if (base == SdeModel::jacobi && regime == ScalingRegime::laguerre)
    require(s.E == 0.0, "local scaling: jacobi -> laguerre needs E = 0");
  if (base == SdeModel::jacobi && regime == ScalingRegime::gaussian)
    require(s.E > 0.0 && s.E < 1.0, "local scaling: jacobi -> gaussian needs 0 < E < 1");
}

double effective_sigma(SdeModel base, ScalingRegime regime, const ScalingSpec& s) {
  validate_regime(base, regime, s);
  if (regime == ScalingRegime::laguerre) return s.gamma / s.tau;
  if (base == SdeModel::laguerre) return std::sqrt(2.0 * s.gamma * s.gamma * s.E / s.tau);
  return std::sqrt(2.0 * s.gamma * s.gamma * s.E * (1.0 - s.E) / s.tau);
}

ScalingSpec canonical_scaling(SdeModel base, ScalingRegime regime, std::size_t n, double sigma) {
  require(n >= 1 && sigma > 0.0, "canonical scaling: need N >= 1 and sigma > 0");
  const double tau = static_cast<double>(n) * static_cast<double>(n);
  ScalingSpec s;
  s.tau = tau;
  if (regime == ScalingRegime::laguerre) {
    s.E = 0.0;
    s.gamma = sigma * tau;
  } else if (base == SdeModel::laguerre) {
    s.E = 1.0;
    s.gamma = sigma * std::sqrt(tau / 2.0);
  } else {
    s.E = 0.5;
    s.gamma = sigma * std::sqrt(2.0 * tau);
  }
  validate_regime(base, regime, s);
  return s;
}

namespace {

struct NativeRun {
  Stepper stepper;
  std::vector<double> init;
  std::size_t steps;
  std::size_t stride;
};

NativeRun prepare_native(SdeModel base, const ScalingSpec& scaling, ScalingRegime regime, const SimConfig& cfg) {
  validate_regime(base, regime, scaling);
  validate_dynamics(base, cfg);
  NativeRun run{{}, cfg.initial_positions(), step_count(cfg.horizon, cfg.dt), storage_stride(cfg.dt)};
  for (double& v : run.init) v = scaling.E + v / scaling.gamma;
  validate_positions(base, run.init);
  const double h = cfg.horizon / static_cast<double>(run.steps) / scaling.tau;
  run.stepper = make_stepper(base, cfg, h);
  return run;
}

void rescale(ParticlePath& path, const ScalingSpec& s) {
  for (double& t : path.times) t *= s.tau;
  for (auto& x : path.positions)
    for (double& v : x) v = s.gamma * (v - s.E);
}

}  // namespace

ParticlePath simulate_local_scaling(SdeModel base, const ScalingSpec& scaling, ScalingRegime regime,
                                    const SimConfig& cfg, std::uint64_t rep) {
  const NativeRun run = prepare_native(base, scaling, regime, cfg);
  RandomStream rng(cfg.seed, rep);
  ParticlePath path = run_particles(run.stepper, run.init, run.steps, run.stride, rng);
  rescale(path, scaling);
  return path;
}

MomentEstimates estimate_local_scaling_moments(SdeModel base, const ScalingSpec& scaling,
                                               ScalingRegime regime, const SimConfig& cfg,
                                               std::size_t n_max) {
  const NativeRun run = prepare_native(base, scaling, regime, cfg);
  return estimate_from_paths(cfg.reps, cfg.threads, n_max, [&](std::size_t r) {
    RandomStream rng(cfg.seed, r);
    ParticlePath path = run_particles(run.stepper, run.init, run.steps, run.stride, rng);
    rescale(path, scaling);
    return path;
  });
}

FlowModel flow_model_of(SdeModel model, const SimConfig& cfg) {
  switch (model) {
    case SdeModel::dyson: return GaussianDynamics{cfg.sigma};
    case SdeModel::laguerre: return LaguerreDynamics{cfg.alpha, cfg.sigma};
    case SdeModel::jacobi: break;
  }
  return JacobiDynamics{cfg.a, cfg.b};
}

}  // namespace mkt
