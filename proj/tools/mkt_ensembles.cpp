// mkt-ensembles: command-line front end for sampling, transforms, flows,
// particle simulations and verification reports.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mkt/csv_io.hpp"
#include "mkt/ensembles.hpp"
#include "mkt/errors.hpp"
#include "mkt/flows.hpp"
#include "mkt/harness.hpp"
#include "mkt/moments.hpp"
#include "mkt/sde.hpp"

namespace fs = std::filesystem;
using namespace mkt;

namespace {

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  std::string out_dir;
};

fs::path resolve(const Globals& g, const std::string& path) {
  fs::path p(path);
  if (p.is_relative() && !g.out_dir.empty()) p = fs::path(g.out_dir) / p;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

// Writes through `fn` to a file, or to stdout for "-".
template <class Fn>
void with_output(const Globals& g, const std::string& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cout);
    return;
  }
  const fs::path p = resolve(g, path);
  std::ofstream out(p);
  if (!out) throw ParameterError("cannot write '" + p.string() + "'");
  fn(out);
}

MomentSequence read_moments_arg(const std::string& path) {
  if (path == "-") return read_moments_csv(std::cin);
  return read_moments_file(path);
}

std::vector<std::complex<double>> parse_z_list(const std::string& text) {
  // "re,im;re,im"
  std::vector<std::complex<double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw ParameterError("z list: expected re,im pairs separated by ';'");
    out.emplace_back(std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1)));
  }
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v)) throw ParameterError("cannot parse list item '" + item + "'");
    out.push_back(v);
  }
  return out;
}

FlowModel make_flow_model(const std::string& name, double sigma, double alpha, double a, double b) {
  if (name == "gaussian" || name == "dyson") return GaussianDynamics{sigma};
  if (name == "laguerre") return LaguerreDynamics{alpha, sigma};
  if (name == "jacobi") return JacobiDynamics{a, b};
  throw ParameterError("unknown model '" + name + "'");
}

int finish_report(const Globals& g, const VerificationReport& report, const std::string& path) {
  const std::string text = report.to_json().dump(2);
  if (!path.empty()) with_output(g, path, [&](std::ostream& o) { o << text << '\n'; });
  for (const auto& c : report.checks)
    std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << "  statistic=" << c.statistic
              << "  tolerance=" << c.tolerance << '\n';
  std::cerr << report.experiment << ": " << (report.passed() ? "PASS" : "FAIL") << '\n';
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beta ensembles at high temperature, Markov-Krein transforms and moment flows"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed (default 0xC0FFEE)");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_option("--out-dir", g.out_dir, "Directory for relative output paths");

  int exit_code = 0;

  // sample
  auto* sample = app.add_subcommand("sample", "Sample tridiagonal ensembles; one CSV row per replica");
  std::string s_model = "gaussian", s_out = "-";
  std::size_t s_n = 10, s_reps = 1;
  double s_c = 1.0, s_alpha = 1.0, s_a = 0.0, s_b = 0.0;
  bool s_weights = false;
  sample->add_option("--model", s_model)->check(CLI::IsMember({"gaussian", "laguerre", "jacobi"}));
  sample->add_option("--n", s_n);
  sample->add_option("--c", s_c);
  sample->add_option("--alpha", s_alpha);
  sample->add_option("--a", s_a);
  sample->add_option("--b", s_b);
  sample->add_option("--reps", s_reps);
  sample->add_flag("--weights", s_weights, "Append spectral weights w_1..w_N");
  sample->add_option("--out", s_out);
  sample->callback([&] {
    EnsembleSpec spec{parse_ensemble_model(s_model), s_n, s_c, s_alpha, s_a, s_b};
    spec.validate();
    with_output(g, s_out, [&](std::ostream& o) {
      write_sample_header(o, s_n, s_weights);
      for (std::size_t r = 0; r < s_reps; ++r) {
        RandomStream rs(g.seed, r);
        write_sample_row(o, r, spectral_measure(build_matrix(spec, rs)), s_weights);
      }
    });
  });

  // transform
  auto* transform = app.add_subcommand("transform", "Markov-Krein transform of a moment file");
  std::string t_kind, t_in, t_out = "-";
  double t_c = 1.0;
  transform->add_option("kind", t_kind)->required()->check(CLI::IsMember({"mkt", "imkt"}));
  transform->add_option("--c", t_c)->required();
  transform->add_option("--in", t_in)->required();
  transform->add_option("--out", t_out);
  transform->callback([&] {
    const MomentSequence in = read_moments_arg(t_in);
    const MomentSequence out = t_kind == "mkt" ? mkt_moments(in, t_c) : imkt_moments(in, t_c);
    with_output(g, t_out, [&](std::ostream& o) { write_moments_csv(o, out); });
  });

  // flow
  auto* flow = app.add_subcommand("flow", "Mean-field moment flow on a time grid");
  std::string f_model = "gaussian", f_init, f_grid = "0:0.1:1", f_out = "-";
  double f_c = 1.0, f_sigma = 1.0, f_alpha = 1.0, f_a = 0.0, f_b = 0.0, f_dt = kDefaultFlowStep;
  std::size_t f_nmax = 8;
  flow->add_option("--model", f_model)->check(CLI::IsMember({"gaussian", "laguerre", "jacobi"}));
  flow->add_option("--c", f_c);
  flow->add_option("--sigma", f_sigma);
  flow->add_option("--alpha", f_alpha);
  flow->add_option("--a", f_a);
  flow->add_option("--b", f_b);
  flow->add_option("--init", f_init, "Initial moment CSV (default: point mass at 0)");
  flow->add_option("--t-grid", f_grid, "start:step:stop or a comma list");
  flow->add_option("--n-max", f_nmax);
  flow->add_option("--dt", f_dt, "RK4 step (Jacobi)");
  flow->add_option("--out", f_out);
  flow->callback([&] {
    const auto grid = parse_time_grid(f_grid);
    FlowSpec spec;
    spec.model = make_flow_model(f_model, f_sigma, f_alpha, f_a, f_b);
    spec.c = f_c;
    spec.n_max = f_nmax;
    spec.init = f_init.empty() ? MomentSequence::delta(f_nmax) : read_moments_arg(f_init);
    spec.horizon = *std::max_element(grid.begin(), grid.end());
    const MomentFlow m = mean_field_flow(spec, f_dt);
    with_output(g, f_out, [&](std::ostream& o) { write_flow_csv(o, m, grid, f_nmax); });
  });

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "Particle or companion SDE simulation");
  std::string m_model = "dyson", m_out = "-", m_scaling, m_regime = "gaussian";
  SimConfig cfg;
  std::size_t m_nmax = 4;
  bool m_full = false;
  double m_start = 0.0;
  simulate_cmd
      ->add_option("--model", m_model)
      ->check(CLI::IsMember({"dyson", "laguerre", "jacobi", "companion-gaussian", "companion-laguerre",
                             "companion-jacobi"}));
  simulate_cmd->add_option("--n", cfg.n);
  simulate_cmd->add_option("--c", cfg.c);
  simulate_cmd->add_option("--sigma", cfg.sigma);
  simulate_cmd->add_option("--alpha", cfg.alpha);
  simulate_cmd->add_option("--a", cfg.a);
  simulate_cmd->add_option("--b", cfg.b);
  simulate_cmd->add_option("--dt", cfg.dt);
  simulate_cmd->add_option("--t", cfg.horizon);
  simulate_cmd->add_option("--reps", cfg.reps, "Replicas (paths for companion models)");
  simulate_cmd->add_option("--delta-min", cfg.delta_min);
  simulate_cmd->add_option("--init-location", cfg.init_location, "Common starting point of all particles");
  simulate_cmd->add_option("--start", m_start, "Companion starting point");
  simulate_cmd->add_option("--n-max", m_nmax);
  simulate_cmd->add_option("--scaling", m_scaling, "gamma,tau,E");
  simulate_cmd->add_option("--regime", m_regime)->check(CLI::IsMember({"gaussian", "laguerre"}));
  simulate_cmd->add_flag("--full", m_full, "Write full positions instead of moments");
  simulate_cmd->add_option("--out", m_out);
  simulate_cmd->callback([&] {
    cfg.seed = g.seed;
    cfg.threads = g.threads;
    if (m_model.rfind("companion-", 0) == 0) {
      CompanionConfig cc;
      cc.c = cfg.c;
      cc.dt = cfg.dt;
      cc.horizon = cfg.horizon;
      cc.paths = cfg.reps;
      cc.seed = g.seed;
      cc.threads = g.threads;
      const auto model = make_flow_model(m_model.substr(10), cfg.sigma, cfg.alpha, cfg.a, cfg.b);
      const auto est = simulate_companion(model, AtomicMeasure::point(m_start), cc, m_nmax);
      with_output(g, m_out, [&](std::ostream& o) { write_estimates_csv(o, est); });
      return;
    }
    const SdeModel model = parse_sde_model(m_model);
    std::optional<ScalingSpec> scaling;
    if (!m_scaling.empty()) {
      const auto v = parse_list<double>(m_scaling);
      if (v.size() != 3) throw ParameterError("--scaling expects gamma,tau,E");
      scaling = ScalingSpec{v[0], v[1], v[2]};
    }
    const ScalingRegime regime = parse_scaling_regime(m_regime);
    std::size_t reflections = 0, particle_steps = 0;
    with_output(g, m_out, [&](std::ostream& o) {
      if (m_full)
        write_positions_header(o, cfg.n);
      else
        write_moment_path_header(o);
      for (std::size_t r = 0; r < cfg.reps; ++r) {
        const ParticlePath path =
            scaling ? simulate_local_scaling(model, *scaling, regime, cfg, r) : simulate(model, cfg, r);
        reflections += path.reflections;
        particle_steps += path.particle_steps;
        if (m_full)
          write_positions_rows(o, r, path);
        else
          write_moment_path_rows(o, r, path, m_nmax);
      }
    });
    const double frac = particle_steps ? static_cast<double>(reflections) / static_cast<double>(particle_steps) : 0.0;
    if (model != SdeModel::dyson) {
      std::cerr << "reflection fraction: " << frac << '\n';
      if (frac > 0.01) std::cerr << "warning: more than 1% of particle steps were reflected; reduce --dt\n";
    }
  });

  // verify
  auto* verify = app.add_subcommand("verify", "Run a verification experiment and write a JSON report");
  verify->require_subcommand(1);
  std::string report_path;
  verify->add_option("--report", report_path, "JSON report path")->configurable();

  auto* v_t1 = verify->add_subcommand("theorem1", "Finite-N identity and N -> infinity limit for an ensemble");
  Theorem1Params t1;
  std::string t1_model = "gaussian", t1_z;
  bool t1_no_limit = false;
  v_t1->add_option("--model", t1_model)->check(CLI::IsMember({"gaussian", "laguerre", "jacobi"}));
  v_t1->add_option("--n", t1.ensemble.n);
  v_t1->add_option("--c", t1.ensemble.c);
  v_t1->add_option("--alpha", t1.ensemble.alpha);
  v_t1->add_option("--a", t1.ensemble.a);
  v_t1->add_option("--b", t1.ensemble.b);
  v_t1->add_option("--reps", t1.reps);
  v_t1->add_option("--z", t1_z, "re,im;re,im (default 0,2;1,1;-1,2)");
  v_t1->add_option("--limit-n", t1.limit_n);
  v_t1->add_option("--limit-reps", t1.limit_reps);
  v_t1->add_flag("--no-limit", t1_no_limit);
  v_t1->add_option("--report", report_path);
  v_t1->callback([&] {
    t1.ensemble.model = parse_ensemble_model(t1_model);
    if (!t1_z.empty()) t1.z_grid = parse_z_list(t1_z);
    t1.run_limit = !t1_no_limit;
    t1.seed = g.seed;
    t1.threads = g.threads;
    exit_code = finish_report(g, verify_theorem1(t1), report_path);
  });

  auto* v_fm = verify->add_subcommand("flow-mkt", "Transform of the moment flow against the companion flow");
  FlowMktParams fm;
  std::string fm_model = "gaussian", fm_init, fm_grid = "0.25,0.5,1,2";
  double fm_sigma = 1.0, fm_alpha = 1.0, fm_a = 0.0, fm_b = 0.0;
  bool fm_gate = false;
  std::optional<double> fm_tol;
  v_fm->add_option("--model", fm_model)->check(CLI::IsMember({"gaussian", "laguerre", "jacobi"}));
  v_fm->add_option("--c", fm.c);
  v_fm->add_option("--sigma", fm_sigma);
  v_fm->add_option("--alpha", fm_alpha);
  v_fm->add_option("--a", fm_a);
  v_fm->add_option("--b", fm_b);
  v_fm->add_option("--init", fm_init, "Initial moment CSV (default: point mass at 0)");
  v_fm->add_option("--t-grid", fm_grid);
  v_fm->add_option("--n-max", fm.n_max);
  v_fm->add_option("--tol", fm_tol, "Default 1e-9, or 1e-5 for jacobi");
  v_fm->add_option("--dt", fm.dt);
  v_fm->add_flag("--sde-check", fm.sde_cross_check, "Add a particle cross-check (point-mass init only)");
  v_fm->add_option("--sde-n", fm.sde_n);
  v_fm->add_option("--sde-reps", fm.sde_reps);
  v_fm->add_flag("--companion-gate", fm_gate, "Validate the companion ODE by Monte Carlo first");
  v_fm->add_option("--report", report_path);
  v_fm->callback([&] {
    fm.model = make_flow_model(fm_model, fm_sigma, fm_alpha, fm_a, fm_b);
    fm.init = fm_init.empty() ? MomentSequence::delta(fm.n_max) : read_moments_arg(fm_init);
    fm.t_grid = parse_time_grid(fm_grid);
    fm.tolerance = fm_tol.value_or(fm_model == "jacobi" ? 1e-5 : 1e-9);
    fm.seed = g.seed;
    fm.threads = g.threads;
    if (fm_gate) {
      CompanionGateParams gate;
      gate.model = fm.model;
      gate.c = fm.c;
      gate.seed = g.seed;
      gate.threads = g.threads;
      const VerificationReport gr = verify_companion(gate);
      if (!gr.passed()) {
        std::cerr << "companion gate failed; flow-mkt check not run\n";
        exit_code = finish_report(g, gr, report_path);
        return;
      }
    }
    exit_code = finish_report(g, verify_flow_mkt(fm), report_path);
  });

  auto* v_ls = verify->add_subcommand("local-scaling", "Rescaled particle systems against the limit flow");
  LocalScalingParams ls;
  std::string ls_base = "laguerre", ls_regime = "gaussian", ls_nlist = "50,100,200";
  v_ls->add_option("--base", ls_base)->check(CLI::IsMember({"laguerre", "jacobi"}));
  v_ls->add_option("--regime", ls_regime)->check(CLI::IsMember({"gaussian", "laguerre"}));
  v_ls->add_option("--n-list", ls_nlist);
  v_ls->add_option("--c", ls.c);
  v_ls->add_option("--sigma", ls.sigma);
  v_ls->add_option("--alpha", ls.alpha);
  v_ls->add_option("--a", ls.a);
  v_ls->add_option("--b", ls.b);
  v_ls->add_option("--dt", ls.dt);
  v_ls->add_option("--t", ls.t);
  v_ls->add_option("--reps", ls.reps);
  v_ls->add_option("--budget", ls.budget);
  v_ls->add_option("--report", report_path);
  v_ls->callback([&] {
    ls.base = parse_sde_model(ls_base);
    ls.regime = parse_scaling_regime(ls_regime);
    ls.n_list = parse_list<std::size_t>(ls_nlist);
    ls.seed = g.seed;
    ls.threads = g.threads;
    exit_code = finish_report(g, verify_local_scaling(ls), report_path);
  });

  auto* v_rerun = verify->add_subcommand("rerun", "Rerun an experiment from an existing report");
  std::string rerun_from;
  v_rerun->add_option("--from", rerun_from)->required();
  v_rerun->add_option("--report", report_path);
  v_rerun->callback([&] {
    std::ifstream in(rerun_from);
    if (!in) throw ParameterError("cannot open '" + rerun_from + "'");
    exit_code = finish_report(g, run_experiment(nlohmann::json::parse(in)), report_path);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}
