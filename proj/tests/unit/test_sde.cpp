#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mkt/errors.hpp"
#include "mkt/sde.hpp"

using namespace mkt;

namespace {

SimConfig base_config(std::size_t n, std::size_t reps) {
  SimConfig cfg;
  cfg.n = n;
  cfg.reps = reps;
  cfg.dt = 1e-2;
  cfg.horizon = 1.0;
  cfg.seed = 17;
  return cfg;
}

bool within(double estimate, double exact, double se, double slack = 0.0) {
  return std::fabs(estimate - exact) <= 4.0 * se + slack;
}

}  // namespace

TEST_CASE("step bookkeeping") {
  CHECK(step_count(1.0, 1e-3) == 1000);
  CHECK(step_count(1.0, 0.3) == 4);
  CHECK(step_count(0.3, 0.1) == 3);
  CHECK(storage_stride(1e-3) == 10);
  CHECK(storage_stride(0.5) == 1);
  const auto path = simulate_dyson(base_config(3, 1));
  CHECK(path.times.front() == 0.0);
  CHECK(path.times.back() == doctest::Approx(1.0));
  CHECK(path.positions.size() == path.times.size());
  CHECK(parse_sde_model("gaussian") == SdeModel::dyson);
  CHECK(to_string(SdeModel::jacobi) == "jacobi");
  CHECK_THROWS_AS(parse_sde_model("wishart"), ParameterError);
}

TEST_CASE("empirical moments of a stored path") {
  ParticlePath path;
  path.times = {0.0, 0.5};
  path.positions = {{-1.0, 1.0}, {0.0, 2.0}};
  const auto s = empirical_moment_paths(path, 3);
  REQUIRE(s.size() == 2);
  CHECK(s[0].vector() == std::vector<double>{1.0, 0.0, 1.0, 0.0});
  CHECK(s[1].vector() == std::vector<double>{1.0, 1.0, 2.0, 4.0});
}

TEST_CASE("single Dyson particle is Brownian motion") {
  auto cfg = base_config(1, 4000);
  cfg.sigma = 1.5;
  const auto est = estimate_moments(SdeModel::dyson, cfg, 2);
  CHECK(within(est.mean_at(1.0, 1), 0.0, est.stderr_at(1.0, 1)));
  CHECK(within(est.mean_at(1.0, 2), 2.25, est.stderr_at(1.0, 2)));
  CHECK(within(est.mean_at(0.5, 2), 1.125, est.stderr_at(0.5, 2)));
}

TEST_CASE("Dyson mean is a martingale and paths stay ordered") {
  auto cfg = base_config(4, 400);
  cfg.init = {-1.0, -0.3, 0.3, 1.0};
  const auto est = estimate_moments(SdeModel::dyson, cfg, 2);
  CHECK(est.mean_at(0.0, 1) == doctest::Approx(0.0));
  CHECK(within(est.mean_at(1.0, 1), 0.0, est.stderr_at(1.0, 1)));
  // Var S_1(T) = sigma^2 T / N
  CHECK(est.variance[est.index_of(1.0)][1] == doctest::Approx(0.25).epsilon(0.2));
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto path = simulate_dyson(cfg, rep);
    for (const auto& x : path.positions)
      for (std::size_t i = 1; i < x.size(); ++i) REQUIRE(x[i - 1] <= x[i]);
    for (const auto& s : empirical_moment_paths(path, 2)) REQUIRE(s[2] >= s[1] * s[1] - 1e-12);
  }
}

TEST_CASE("single Laguerre particle is a squared Bessel process") {
  auto cfg = base_config(1, 4000);
  cfg.alpha = 2.0;
  cfg.sigma = 0.8;
  const auto est = estimate_moments(SdeModel::laguerre, cfg, 1);
  CHECK(within(est.mean_at(1.0, 1), 0.8 * 2.0, est.stderr_at(1.0, 1), 0.01));
  CHECK(within(est.mean_at(0.5, 1), 0.8, est.stderr_at(0.5, 1), 0.01));
  auto many = base_config(20, 1);
  many.alpha = 1.0;
  for (std::uint64_t rep = 0; rep < 10; ++rep)
    for (const auto& x : simulate_laguerre(many, rep).positions)
      for (double v : x) REQUIRE(v >= 0.0);
}

TEST_CASE("symmetric Jacobi particle keeps its mean") {
  auto cfg = base_config(1, 4000);
  cfg.init_location = 0.5;
  cfg.a = cfg.b = 0.5;
  const auto est = estimate_moments(SdeModel::jacobi, cfg, 1);
  CHECK(within(est.mean_at(1.0, 1), 0.5, est.stderr_at(1.0, 1)));
  auto many = base_config(20, 1);
  many.init_location = 0.5;
  for (std::uint64_t rep = 0; rep < 10; ++rep)
    for (const auto& x : simulate_jacobi(many, rep).positions)
      for (double v : x) REQUIRE((v >= 0.0 && v <= 1.0));
}

TEST_CASE("fluctuations shrink with N") {
  auto small = base_config(50, 200);
  auto large = base_config(200, 200);
  const auto s = estimate_moments(SdeModel::dyson, small, 2);
  const auto l = estimate_moments(SdeModel::dyson, large, 2);
  const double ratio = s.variance[s.index_of(1.0)][2] / l.variance[l.index_of(1.0)][2];
  CHECK(ratio > 2.0);
  CHECK(ratio < 8.0);
}

TEST_CASE("reproducibility") {
  auto cfg = base_config(10, 12);
  cfg.threads = 1;
  const auto one = estimate_moments(SdeModel::laguerre, cfg, 3);
  cfg.threads = 3;
  const auto three = estimate_moments(SdeModel::laguerre, cfg, 3);
  CHECK(one.mean == three.mean);
  CHECK(one.variance == three.variance);
  const auto a = simulate_jacobi(cfg, 5);
  const auto b = simulate_jacobi(cfg, 5);
  CHECK(a.positions == b.positions);
  CHECK(simulate_jacobi(cfg, 6).positions != a.positions);
}

TEST_CASE("local scaling") {
  auto cfg = base_config(8, 1);
  cfg.init_location = 0.3;
  const ScalingSpec identity{1.0, 1.0, 0.0};
  const auto scaled = simulate_local_scaling(SdeModel::jacobi, identity, ScalingRegime::laguerre, cfg, 3);
  const auto native = simulate_jacobi(cfg, 3);
  CHECK(scaled.positions == native.positions);
  CHECK(scaled.times == native.times);

  for (auto [base, regime] : {std::pair{SdeModel::laguerre, ScalingRegime::gaussian},
                              std::pair{SdeModel::jacobi, ScalingRegime::gaussian},
                              std::pair{SdeModel::jacobi, ScalingRegime::laguerre}}) {
    const auto s = canonical_scaling(base, regime, 50, 1.3);
    CHECK(s.tau == 2500.0);
    CHECK(effective_sigma(base, regime, s) == doctest::Approx(1.3));
    CHECK_NOTHROW(validate_regime(base, regime, s));
  }
  CHECK_THROWS_AS(validate_regime(SdeModel::dyson, ScalingRegime::gaussian, identity), ParameterError);
  CHECK_THROWS_AS(validate_regime(SdeModel::laguerre, ScalingRegime::laguerre, identity), ParameterError);
  CHECK_THROWS_AS(validate_regime(SdeModel::jacobi, ScalingRegime::gaussian, identity), ParameterError);
  CHECK_THROWS_AS((ScalingSpec{0.0, 1.0, 0.0}.validate()), ParameterError);
}

TEST_CASE("companion diffusions") {
  CompanionConfig cfg;
  cfg.paths = 20000;
  cfg.dt = 1e-2;
  cfg.seed = 5;
  const auto g = simulate_companion(GaussianDynamics{1.2}, AtomicMeasure::point(0.0), cfg, 2);
  CHECK(within(g.mean_at(1.0, 2), 1.44, g.stderr_at(1.0, 2)));
  const auto l = simulate_companion(LaguerreDynamics{1.0, 1.0}, AtomicMeasure::point(0.0), cfg, 1);
  CHECK(within(l.mean_at(1.0, 1), 2.0, l.stderr_at(1.0, 1), 0.01));
  const auto j = simulate_companion(JacobiDynamics{0.0, 0.0}, AtomicMeasure({0.2, 0.8}, {0.5, 0.5}), cfg, 1);
  CHECK(within(j.mean_at(1.0, 1), 0.5, j.stderr_at(1.0, 1)));
  CHECK_THROWS_AS(simulate_companion(LaguerreDynamics{1.0, 1.0}, AtomicMeasure::point(-1.0), cfg, 1), ParameterError);
}

TEST_CASE("errors") {
  auto cfg = base_config(3, 1);
  SUBCASE("blow-up") {
    cfg.sigma = 1e8;
    CHECK_THROWS_AS(simulate_dyson(cfg), NumericalError);
  }
  SUBCASE("parameters") {
    auto bad = cfg;
    bad.n = 0;
    CHECK_THROWS_AS(simulate_dyson(bad), ParameterError);
    bad = cfg;
    bad.dt = 0.0;
    CHECK_THROWS_AS(simulate_dyson(bad), ParameterError);
    bad = cfg;
    bad.alpha = 0.4;
    CHECK_THROWS_AS(simulate_laguerre(bad), ParameterError);
    bad = cfg;
    bad.a = -0.6;
    bad.init_location = 0.5;
    CHECK_THROWS_AS(simulate_jacobi(bad), ParameterError);
    bad = cfg;
    bad.init = {0.1, 0.2};
    CHECK_THROWS_AS(simulate_dyson(bad), ParameterError);
    bad = cfg;
    bad.init_location = 1.5;
    CHECK_THROWS_AS(simulate_jacobi(bad), ParameterError);
    bad.init_location = -0.5;
    CHECK_THROWS_AS(simulate_laguerre(bad), ParameterError);
  }
  SUBCASE("unknown stored time") {
    const auto est = estimate_moments(SdeModel::dyson, cfg, 1);
    CHECK_THROWS_AS(est.index_of(5.0), ParameterError);
  }
}
