#include "mkt/flows.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mkt/errors.hpp"
#include "mkt/moments.hpp"

namespace mkt {

std::string model_name(const FlowModel& m) {
  if (std::holds_alternative<GaussianDynamics>(m)) return "gaussian";
  if (std::holds_alternative<LaguerreDynamics>(m)) return "laguerre";
  return "jacobi";
}

void FlowSpec::validate() const {
  require(c > 0.0 && std::isfinite(c), "flow: c must be > 0");
  require(horizon >= 0.0 && std::isfinite(horizon), "flow: horizon must be >= 0");
  require(n_max <= init.n_max(), "flow: initial moments shorter than n_max");
  if (const auto* g = std::get_if<GaussianDynamics>(&model)) {
    require(g->sigma > 0.0, "Gaussian flow: sigma must be > 0");
  } else if (const auto* l = std::get_if<LaguerreDynamics>(&model)) {
    require(l->alpha > 0.0, "Laguerre flow: alpha must be > 0");
    require(l->sigma > 0.0, "Laguerre flow: sigma must be > 0");
    for (std::size_t n = 0; n <= n_max; n += 2)
      require(init[n] >= 0.0, "Laguerre flow: initial moments must come from [0, inf)");
  } else {
    const auto& j = std::get<JacobiDynamics>(model);
    require(j.a > -1.0 && j.b > -1.0, "Jacobi flow: a and b must be > -1");
    for (std::size_t n = 0; n <= n_max; ++n)
      require(init[n] >= 0.0 && init[n] <= 1.0 + 1e-12,
              "Jacobi flow: initial moments must come from a measure on [0, 1]");
  }
}

double ExponentialSum::operator()(double t) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < rates.size(); ++k) acc += coeffs[k] * std::exp(rates[k] * t);
  return acc;
}

double ExponentialSum::derivative(double t) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < rates.size(); ++k) acc += coeffs[k] * rates[k] * std::exp(rates[k] * t);
  return acc;
}

MomentFlow MomentFlow::from_polynomials(std::vector<Polynomial> orders, double horizon) {
  MomentFlow f;
  f.kind_ = Kind::polynomial;
  f.n_max_ = orders.size() - 1;
  f.horizon_ = horizon;
  f.polys_ = std::move(orders);
  return f;
}

MomentFlow MomentFlow::from_exponentials(std::vector<ExponentialSum> orders, double horizon) {
  MomentFlow f;
  f.kind_ = Kind::exponential;
  f.n_max_ = orders.size() - 1;
  f.horizon_ = horizon;
  f.exps_ = std::move(orders);
  return f;
}

MomentFlow MomentFlow::from_grid(double step, std::vector<std::vector<double>> values,
                                 std::vector<std::vector<double>> slopes, double horizon) {
  MomentFlow f;
  f.kind_ = Kind::grid;
  f.n_max_ = values.front().size() - 1;
  f.horizon_ = horizon;
  f.step_ = step;
  f.values_ = std::move(values);
  f.slopes_ = std::move(slopes);
  return f;
}

const Polynomial& MomentFlow::polynomial(std::size_t n) const {
  if (kind_ != Kind::polynomial) throw ParameterError("flow is not stored as polynomials");
  return polys_.at(n);
}

double MomentFlow::value(std::size_t n, double t) const {
  if (n > n_max_) throw ParameterError("flow: order exceeds n_max");
  const double slack = 1e-12 * std::max(1.0, horizon_);
  if (!(t >= -slack && t <= horizon_ + slack))
    throw ParameterError("flow: t outside [0, T]");
  if (n == 0) return 1.0;
  switch (kind_) {
    case Kind::polynomial: return polys_[n](t);
    case Kind::exponential: return exps_[n](t);
    case Kind::grid: break;
  }
  const double pos = std::clamp(t, 0.0, horizon_) / step_;
  const double nearest = std::round(pos);
  const std::size_t last = values_.size() - 1;
  if (std::fabs(pos - nearest) < 1e-9) return values_[std::min<std::size_t>(nearest, last)][n];
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(pos), last - 1);
  const double s = pos - static_cast<double>(k);
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * values_[k][n] + h10 * step_ * slopes_[k][n] + h01 * values_[k + 1][n] +
         h11 * step_ * slopes_[k + 1][n];
}

std::vector<double> MomentFlow::at(double t) const {
  std::vector<double> out(n_max_ + 1);
  for (std::size_t n = 0; n <= n_max_; ++n) out[n] = value(n, t);
  out[0] = 1.0;
  return out;
}

MomentRhs mean_field_rhs(const FlowModel& model, double c) {
  if (const auto* g = std::get_if<GaussianDynamics>(&model)) {
    const double s2 = g->sigma * g->sigma;
    return [s2, c](std::span<const double> m, std::span<double> dm) {
      dm[0] = 0.0;
      if (dm.size() > 1) dm[1] = 0.0;
      for (std::size_t n = 2; n < m.size(); ++n) {
        double conv = 0.0;
        for (std::size_t j = 0; j + 2 <= n; ++j) conv += m[j] * m[n - 2 - j];
        const double dn = static_cast<double>(n);
        dm[n] = s2 * (0.5 * c * dn * conv + 0.5 * dn * (dn - 1) * m[n - 2]);
      }
    };
  }
  if (const auto* l = std::get_if<LaguerreDynamics>(&model)) {
    const double sigma = l->sigma, alpha = l->alpha;
    return [sigma, alpha, c](std::span<const double> m, std::span<double> dm) {
      dm[0] = 0.0;
      for (std::size_t n = 1; n < m.size(); ++n) {
        double conv = 0.0;
        for (std::size_t j = 0; j < n; ++j) conv += m[j] * m[n - 1 - j];
        const double dn = static_cast<double>(n);
        dm[n] = sigma * (dn * (dn + alpha - 1) * m[n - 1] + c * dn * conv);
      }
    };
  }
  const auto& jd = std::get<JacobiDynamics>(model);
  const double a = jd.a, b = jd.b;
  return [a, b, c](std::span<const double> m, std::span<double> dm) {
    dm[0] = 0.0;
    for (std::size_t n = 1; n < m.size(); ++n) {
      const double dn = static_cast<double>(n);
      double conv_lower = 0.0;
      for (std::size_t i = 0; i < n; ++i) conv_lower += m[i] * m[n - 1 - i];
      double conv_inner = 0.0;
      for (std::size_t j = 1; j < n; ++j) conv_inner += m[j] * m[n - j];
      dm[n] = -dn * (2 * c + a + b + dn + 1) * m[n] + dn * (a + dn) * m[n - 1] +
              c * dn * conv_lower - c * dn * conv_inner;
    }
  };
}

MomentRhs companion_rhs(const FlowModel& model, double c) {
  if (const auto* g = std::get_if<GaussianDynamics>(&model)) {
    const double s2 = g->sigma * g->sigma;
    return [s2](std::span<const double> h, std::span<double> dh) {
      for (std::size_t n = 0; n < h.size(); ++n) {
        const double dn = static_cast<double>(n);
        dh[n] = n >= 2 ? s2 * 0.5 * dn * (dn - 1) * h[n - 2] : 0.0;
      }
    };
  }
  if (const auto* l = std::get_if<LaguerreDynamics>(&model)) {
    const double sigma = l->sigma, theta = l->alpha + c;
    return [sigma, theta](std::span<const double> h, std::span<double> dh) {
      dh[0] = 0.0;
      for (std::size_t n = 1; n < h.size(); ++n) {
        const double dn = static_cast<double>(n);
        dh[n] = sigma * dn * (theta + dn - 1) * h[n - 1];
      }
    };
  }
  const auto& jd = std::get<JacobiDynamics>(model);
  const double a = jd.a, b = jd.b;
  return [a, b, c](std::span<const double> h, std::span<double> dh) {
    dh[0] = 0.0;
    for (std::size_t n = 1; n < h.size(); ++n) {
      const double dn = static_cast<double>(n);
      dh[n] = dn * (a + c + dn) * h[n - 1] - dn * (a + b + 2 * c + dn + 1) * h[n];
    }
  };
}

MomentFlow integrate_rk4(const MomentRhs& rhs, std::vector<double> init, double horizon, double dt,
                         const StepGuard& guard) {
  require(dt > 0.0, "integrate_rk4: dt must be > 0");
  require(horizon >= 0.0, "integrate_rk4: horizon must be >= 0");
  const std::size_t dim = init.size();
  const std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9)));
  const double h = horizon > 0.0 ? horizon / static_cast<double>(steps) : dt;

  std::vector<std::vector<double>> values, slopes;
  values.reserve(steps + 1);
  slopes.reserve(steps + 1);
  std::vector<double> y = std::move(init), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  rhs(y, k1);
  values.push_back(y);
  slopes.push_back(k1);
  const std::size_t count = horizon > 0.0 ? steps : 0;
  for (std::size_t step = 0; step < count; ++step) {
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(tmp, k3);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(tmp, k4);
    for (std::size_t i = 0; i < dim; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    if (guard) guard(static_cast<double>(step + 1) * h, y);
    rhs(y, k1);
    values.push_back(y);
    slopes.push_back(k1);
  }
  return MomentFlow::from_grid(h, std::move(values), std::move(slopes), horizon);
}

namespace {

void check_order_cap(std::size_t n_max) {
  if (n_max > kMaxFlowOrder)
    throw CapabilityError("polynomial moment flows are capped at n_max = 12");
}

}  // namespace

MomentFlow gaussian_flow(const FlowSpec& spec) {
  spec.validate();
  const auto* g = std::get_if<GaussianDynamics>(&spec.model);
  require(g != nullptr, "gaussian_flow: model must be Gaussian");
  check_order_cap(spec.n_max);
  const double s2 = g->sigma * g->sigma;
  std::vector<Polynomial> m(spec.n_max + 1);
  m[0] = Polynomial::constant(1.0);
  if (spec.n_max >= 1) m[1] = Polynomial::constant(spec.init[1]);
  for (std::size_t n = 2; n <= spec.n_max; ++n) {
    const double dn = static_cast<double>(n);
    Polynomial rate = m[n - 2] * (0.5 * dn * (dn - 1));
    Polynomial conv;
    for (std::size_t j = 0; j + 2 <= n; ++j) conv += m[j] * m[n - 2 - j];
    rate += conv * (0.5 * spec.c * dn);
    m[n] = Polynomial::constant(spec.init[n]) + (rate * s2).integral();
  }
  return MomentFlow::from_polynomials(std::move(m), spec.horizon);
}

MomentFlow laguerre_flow(const FlowSpec& spec) {
  spec.validate();
  const auto* l = std::get_if<LaguerreDynamics>(&spec.model);
  require(l != nullptr, "laguerre_flow: model must be Laguerre");
  check_order_cap(spec.n_max);
  std::vector<Polynomial> m(spec.n_max + 1);
  m[0] = Polynomial::constant(1.0);
  for (std::size_t n = 1; n <= spec.n_max; ++n) {
    const double dn = static_cast<double>(n);
    Polynomial rate = m[n - 1] * (dn * (dn + l->alpha - 1));
    Polynomial conv;
    for (std::size_t j = 0; j < n; ++j) conv += m[j] * m[n - 1 - j];
    rate += conv * (spec.c * dn);
    m[n] = Polynomial::constant(spec.init[n]) + (rate * l->sigma).integral();
  }
  return MomentFlow::from_polynomials(std::move(m), spec.horizon);
}

MomentFlow jacobi_flow(const FlowSpec& spec, double dt) {
  spec.validate();
  require(std::holds_alternative<JacobiDynamics>(spec.model), "jacobi_flow: model must be Jacobi");
  require(dt > 0.0, "jacobi_flow: dt must be > 0");
  const auto init = spec.init.truncated(spec.n_max).vector();
  const StepGuard guard = [dt](double t, std::span<const double> m) {
    for (std::size_t n = 0; n < m.size(); ++n) {
      if (!(m[n] >= -1e-6 && m[n] <= 1.0 + 1e-6)) {
        std::ostringstream msg;
        msg << "jacobi_flow: m_" << n << "(" << t << ") = " << m[n]
            << " left [0, 1]; retry with a step smaller than " << dt;
        throw NumericalError(msg.str());
      }
    }
  };
  return integrate_rk4(mean_field_rhs(spec.model, spec.c), init, spec.horizon, dt, guard);
}

MomentFlow mean_field_flow(const FlowSpec& spec, double dt) {
  if (std::holds_alternative<GaussianDynamics>(spec.model)) return gaussian_flow(spec);
  if (std::holds_alternative<LaguerreDynamics>(spec.model)) return laguerre_flow(spec);
  return jacobi_flow(spec, dt);
}

MomentFlow companion_flow(const FlowModel& model, double c, const MomentSequence& init_h,
                          std::size_t n_max, double horizon) {
  require(c > 0.0, "companion_flow: c must be > 0");
  require(n_max <= init_h.n_max(), "companion_flow: initial moments shorter than n_max");
  require(horizon >= 0.0, "companion_flow: horizon must be >= 0");

  if (const auto* g = std::get_if<GaussianDynamics>(&model)) {
    check_order_cap(n_max);
    const double s2 = g->sigma * g->sigma;
    std::vector<Polynomial> h(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
      const double dn = static_cast<double>(n);
      h[n] = Polynomial::constant(init_h[n]);
      if (n >= 2) h[n] += (h[n - 2] * (s2 * 0.5 * dn * (dn - 1))).integral();
    }
    return MomentFlow::from_polynomials(std::move(h), horizon);
  }
  if (const auto* l = std::get_if<LaguerreDynamics>(&model)) {
    check_order_cap(n_max);
    const double theta = l->alpha + c;
    std::vector<Polynomial> h(n_max + 1);
    h[0] = Polynomial::constant(1.0);
    for (std::size_t n = 1; n <= n_max; ++n) {
      const double dn = static_cast<double>(n);
      h[n] = Polynomial::constant(init_h[n]) +
             (h[n - 1] * (l->sigma * dn * (theta + dn - 1))).integral();
    }
    return MomentFlow::from_polynomials(std::move(h), horizon);
  }

  // h_n' = rate_n h_n + drive_n h_{n-1} with distinct rates, solved exactly:
  // if h_{n-1} = sum_k C_k e^{r_k t} then h_n = sum_{k<n} drive_n C_k/(r_k - r_n) e^{r_k t}
  // + (h_n(0) - sum) e^{r_n t}.
  const auto& jd = std::get<JacobiDynamics>(model);
  require(jd.a > -1.0 && jd.b > -1.0, "companion_flow: a and b must be > -1");
  std::vector<double> rate(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double dn = static_cast<double>(n);
    rate[n] = -dn * (jd.a + jd.b + 2 * c + dn + 1);
  }
  std::vector<ExponentialSum> h(n_max + 1);
  h[0] = {{0.0}, {1.0}};
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double dn = static_cast<double>(n);
    const double drive = dn * (jd.a + c + dn);
    ExponentialSum cur;
    double partial = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double coeff = drive * h[n - 1].coeffs[k] / (rate[k] - rate[n]);
      cur.rates.push_back(rate[k]);
      cur.coeffs.push_back(coeff);
      partial += coeff;
    }
    cur.rates.push_back(rate[n]);
    cur.coeffs.push_back(init_h[n] - partial);
    h[n] = std::move(cur);
  }
  return MomentFlow::from_exponentials(std::move(h), horizon);
}

FlowCheckReport flow_mkt_check(const FlowSpec& spec, std::span<const double> t_grid, double tol,
                               double dt) {
  spec.validate();
  FlowCheckReport report;
  report.tolerance = tol;
  const MomentSequence init = spec.init.truncated(spec.n_max);
  const MomentFlow flow = mean_field_flow(spec, dt);
  const MomentFlow comp =
      companion_flow(spec.model, spec.c, mkt_moments(init, spec.c), spec.n_max, spec.horizon);

  for (double t : t_grid) {
    const MomentSequence transformed = mkt_moments(flow.moments_at(t), spec.c);
    for (std::size_t n = 1; n <= spec.n_max; ++n) {
      FlowCheckEntry e;
      e.t = t;
      e.n = n;
      e.transformed = transformed[n];
      e.companion = comp.value(n, t);
      e.residual = std::fabs(e.transformed - e.companion) / std::max(1.0, std::fabs(e.companion));
      report.max_residual = std::max(report.max_residual, e.residual);
      report.entries.push_back(e);
    }
  }
  if (std::holds_alternative<JacobiDynamics>(spec.model)) {
    const MomentFlow fine = jacobi_flow(spec, 0.5 * dt);
    for (double t : t_grid)
      for (std::size_t n = 1; n <= spec.n_max; ++n)
        report.richardson = std::max(report.richardson, std::fabs(flow.value(n, t) - fine.value(n, t)));
  }
  report.passed = report.max_residual <= tol;
  return report;
}

double growth_envelope_bound(double sigma, double c, double horizon, double lambda) {
  return std::sqrt(std::max(sigma * sigma * (c + 1) * horizon, 2 * lambda * lambda));
}

GrowthEnvelope growth_envelope_check(const FlowSpec& spec, const MomentFlow& flow, double lambda) {
  const auto* g = std::get_if<GaussianDynamics>(&spec.model);
  require(g != nullptr, "growth_envelope_check: Gaussian flows only");
  require(lambda >= 0.0, "growth_envelope_check: Lambda must be >= 0");
  for (std::size_t n = 1; n <= spec.n_max; ++n) {
    const double dn = static_cast<double>(n);
    require(std::fabs(spec.init[n]) <= std::pow(lambda * dn, dn) * (1 + 1e-12),
            "growth_envelope_check: initial moments exceed (Lambda n)^n");
  }
  GrowthEnvelope out;
  out.bound = growth_envelope_bound(g->sigma, spec.c, spec.horizon, lambda);
  constexpr int samples = 2000;
  for (int k = 0; k <= samples; ++k) {
    const double t = spec.horizon * static_cast<double>(k) / samples;
    for (std::size_t n = 1; n <= flow.n_max(); ++n) {
      const double v = std::fabs(flow.value(n, t));
      if (v == 0.0) continue;
      const double dn = static_cast<double>(n);
      out.envelope = std::max(out.envelope, std::pow(v, 1.0 / dn) / dn);
    }
  }
  out.passed = out.envelope <= out.bound + 1e-12;
  return out;
}

}  // namespace mkt
