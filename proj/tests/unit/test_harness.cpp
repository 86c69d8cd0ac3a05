#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <vector>

#include "mkt/csv_io.hpp"
#include "mkt/errors.hpp"
#include "mkt/harness.hpp"

using namespace mkt;

TEST_CASE("moment CSV round trip") {
  const MomentSequence m{1.0, -0.25, 1.0 / 3.0, 1e-300, 12345.678};
  std::stringstream ss;
  write_moments_csv(ss, m);
  const auto back = read_moments_csv(ss);
  CHECK(back.vector() == m.vector());

  std::istringstream missing_header("0,1\n1,0.5\n");
  CHECK_THROWS_AS(read_moments_csv(missing_header), ParameterError);
  std::istringstream bad_order("n,value\n0,1\n2,0.5\n");
  CHECK_THROWS_AS(read_moments_csv(bad_order), ParameterError);
  std::istringstream bad_zero("n,value\n0,2\n1,0.5\n");
  CHECK_THROWS_AS(read_moments_csv(bad_zero), ParameterError);
  CHECK_THROWS(read_moments_file("/nonexistent/moments.csv"));
}

TEST_CASE("measure CSV round trip") {
  const AtomicMeasure m({-1.5, 0.25, 3.0}, {0.2, 0.3, 0.5});
  std::stringstream ss;
  write_measure_csv(ss, m);
  const auto back = read_measure_csv(ss);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.locations()[i] == m.locations()[i]);
    CHECK(back.weights()[i] == m.weights()[i]);
  }
}

TEST_CASE("time grids") {
  const auto g = parse_time_grid("0:0.25:1");
  CHECK(g == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(parse_time_grid("0.5,2") == std::vector<double>{0.5, 2.0});
  CHECK(parse_time_grid("0:0.1:2").size() == 21);
  CHECK_THROWS_AS(parse_time_grid("0:-1:2"), ParameterError);
  CHECK_THROWS_AS(parse_time_grid("a,b"), ParameterError);
}

TEST_CASE("flow CSV layout") {
  FlowSpec spec;
  spec.n_max = 2;
  spec.init = MomentSequence::delta(2);
  const auto f = gaussian_flow(spec);
  std::ostringstream out;
  const std::vector<double> grid{0.0, 1.0};
  write_flow_csv(out, f, grid, 2);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,n,m_n");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 6);
}

TEST_CASE("report JSON round trip") {
  VerificationReport r;
  r.experiment = "flow-mkt";
  r.parameters = {{"c", 1.5}};
  r.seeds = {1, 2};
  r.add({"a", 0.1, 1.0, true, {{"x", 1}}});
  r.add({"b", 2.0, 1.0, false, nlohmann::json::object()});
  r.wall_time_seconds = 0.5;
  const auto j = r.to_json();
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["pass"] == false);
  const auto back = VerificationReport::from_json(j);
  CHECK(back.to_json() == j);
  CHECK_FALSE(VerificationReport{}.passed());
}

TEST_CASE("parameter JSON round trips") {
  FlowMktParams fm;
  fm.model = JacobiDynamics{0.5, -0.25};
  fm.c = 2.0;
  fm.init = MomentSequence::delta(6, 0.5);
  fm.n_max = 6;
  CHECK(FlowMktParams::from_json(fm.to_json()).to_json() == fm.to_json());
  Theorem1Params t1;
  t1.ensemble = EnsembleSpec::laguerre(30, 0.5, 1.5);
  CHECK(Theorem1Params::from_json(t1.to_json()).to_json() == t1.to_json());
  LocalScalingParams ls;
  ls.base = SdeModel::jacobi;
  ls.regime = ScalingRegime::laguerre;
  CHECK(LocalScalingParams::from_json(ls.to_json()).to_json() == ls.to_json());
  CompanionGateParams cg;
  CHECK(CompanionGateParams::from_json(cg.to_json()).to_json() == cg.to_json());
  CHECK_THROWS(flow_model_from_json(nlohmann::json{{"model", "wishart"}}));
}

TEST_CASE("experiments rerun bit for bit") {
  Theorem1Params t1;
  t1.ensemble = EnsembleSpec::gaussian(20, 1.0);
  t1.reps = 500;
  t1.run_limit = false;
  t1.seed = 99;
  const auto first = verify_theorem1(t1);
  CHECK(first.passed());
  auto j = first.to_json();
  const auto again = run_experiment(j);
  auto j2 = again.to_json();
  j.erase("wall_time_seconds");
  j2.erase("wall_time_seconds");
  CHECK(j == j2);

  FlowMktParams fm;
  fm.c = 0.5;
  fm.init = MomentSequence{1.0, 0.0, 1.0, 0.0, 1.0};
  fm.n_max = 4;
  const auto flow = verify_flow_mkt(fm);
  CHECK(flow.passed());
  CHECK(run_experiment(flow.to_json()).passed());
  CHECK_THROWS(run_experiment(nlohmann::json{{"experiment", "nothing"}, {"parameters", nlohmann::json::object()}}));
}

TEST_CASE("failed checks are reported, not thrown") {
  FlowMktParams fm;
  fm.model = JacobiDynamics{0.0, 0.0};
  fm.init = MomentSequence::delta(6, 0.5);
  fm.n_max = 6;
  fm.t_grid = {0.25, 1.0};
  fm.tolerance = 0.0;
  const auto r = verify_flow_mkt(fm);
  CHECK_FALSE(r.passed());
}
