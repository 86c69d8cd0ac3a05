#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "mkt/errors.hpp"
#include "mkt/rng.hpp"

using namespace mkt;

namespace {

struct Stats {
  double mean = 0.0;
  double var = 0.0;
};

template <class Draw>
Stats draw_stats(std::size_t count, Draw&& draw) {
  std::vector<double> v(count);
  for (auto& x : v) x = draw();
  Stats s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(count);
  for (double x : v) s.var += (x - s.mean) * (x - s.mean);
  s.var /= static_cast<double>(count - 1);
  return s;
}

}  // namespace

TEST_CASE("same key gives the same sequence") {
  RandomStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  RandomStream c(42, 7), d(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(sample_gamma(c, 0.3, 1.0) == sample_gamma(d, 0.3, 1.0));
}

TEST_CASE("distinct stream ids decorrelate") {
  RandomStream a(42, 0), b(42, 1);
  int equal = 0;
  double cross = 0.0;
  constexpr int n = 100000;
  for (int i = 0; i < n; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
    cross += a.normal() * b.normal();
  }
  CHECK(equal == 0);
  CHECK(std::fabs(cross / n) < 4.0 / std::sqrt(double(n)));
}

TEST_CASE("default seed") { CHECK(RandomStream().seed() == 0xC0FFEEu); }

TEST_CASE("uniform stays inside the open interval") {
  RandomStream s(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("normal sampler") {
  RandomStream s(3, 0);
  CHECK(sample_normal(s, 3.0, 0.0) == 3.0);
  const Stats st = draw_stats(100000, [&] { return sample_normal(s, 0.0, 1.0); });
  CHECK(std::fabs(st.mean) < 0.02);
  CHECK(std::fabs(st.var - 1.0) < 0.03);
  CHECK_THROWS_AS(sample_normal(s, 0.0, -1.0), ParameterError);
}

TEST_CASE("gamma sampler") {
  RandomStream s(5, 0);
  SUBCASE("shape 2") {
    const Stats st = draw_stats(100000, [&] { return sample_gamma(s, 2.0, 1.0); });
    CHECK(std::fabs(st.mean - 2.0) < 0.05);
    CHECK(std::fabs(st.var - 2.0) < 4.0 * std::sqrt(2.0 * 2.0 * 2.0 * 4.0 / 1e5) + 0.05);
  }
  SUBCASE("shape 0.01 uses the small-shape path") {
    const Stats st = draw_stats(100000, [&] { return sample_gamma(s, 0.01, 1.0); });
    CHECK(std::fabs(st.mean - 0.01) < 0.005);
  }
  SUBCASE("scale") {
    const Stats st = draw_stats(100000, [&] { return sample_gamma(s, 3.0, 0.5); });
    CHECK(std::fabs(st.mean - 1.5) < 4.0 * std::sqrt(0.75 / 1e5));
  }
  SUBCASE("chi tilde squared has mean k/2") {
    const Stats st = draw_stats(100000, [&] {
      const double x = sample_chi_tilde(s, 3.0);
      return x * x;
    });
    CHECK(std::fabs(st.mean - 1.5) < 0.05);
  }
  SUBCASE("tiny shapes stay finite") {
    for (int i = 0; i < 1000; ++i) {
      const double lg = sample_log_gamma(s, 1e-6);
      REQUIRE(std::isfinite(lg));
      const double g = sample_gamma(s, 1e-6, 1.0);
      REQUIRE(g >= 0.0);
    }
  }
  CHECK_THROWS_AS(sample_gamma(s, 0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(sample_gamma(s, 1.0, -1.0), ParameterError);
}

TEST_CASE("beta sampler") {
  RandomStream s(9, 0);
  const Stats uni = draw_stats(100000, [&] { return sample_beta(s, 1.0, 1.0); });
  CHECK(std::fabs(uni.mean - 0.5) < 0.01);
  const Stats b23 = draw_stats(100000, [&] { return sample_beta(s, 2.0, 3.0); });
  CHECK(std::fabs(b23.mean - 0.4) < 0.01);
  const Stats sq = draw_stats(100000, [&] {
    const double x = sample_beta(s, 2.0, 3.0);
    return x * x;
  });
  CHECK(std::fabs(sq.mean - 0.2) < 0.01);
  for (int i = 0; i < 1000; ++i) {
    const BetaDraw d = sample_beta_pair(s, 0.01, 0.02);
    REQUIRE(d.value >= 0.0);
    REQUIRE(d.value <= 1.0);
    REQUIRE(std::fabs(d.value + d.complement - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(sample_beta(s, 0.0, 1.0), ParameterError);
}

TEST_CASE("symmetric Dirichlet") {
  RandomStream s(11, 0);
  CHECK(sample_dirichlet_symmetric(s, 1, 0.3) == std::vector<double>{1.0});
  CHECK_THROWS_AS(sample_dirichlet_symmetric(s, 0, 1.0), ParameterError);
  CHECK_THROWS_AS(sample_dirichlet_symmetric(s, 3, 0.0), ParameterError);

  SUBCASE("component means") {
    const Stats st = draw_stats(10000, [&] { return sample_dirichlet_symmetric(s, 4, 0.7)[0]; });
    CHECK(std::fabs(st.mean - 0.25) < 0.01);
  }
  SUBCASE("second moment for N = 2") {
    for (double kappa : {0.05, 0.5, 2.0}) {
      const Stats st = draw_stats(100000, [&] {
        const double w = sample_dirichlet_symmetric(s, 2, kappa)[0];
        return w * w;
      });
      const double expected = (kappa + 1.0) / (2.0 * (2.0 * kappa + 1.0));
      CHECK(std::fabs(st.mean - expected) < 4.0 * std::sqrt(st.var / 1e5));
    }
  }
  SUBCASE("normalization, including tiny parameters") {
    for (double kappa : {1e-4, 0.01, 1.0, 50.0})
      for (int i = 0; i < 200; ++i) {
        const auto w = sample_dirichlet_symmetric(s, 25, kappa);
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        REQUIRE(std::fabs(total - 1.0) < 1e-12);
        for (double x : w) REQUIRE(x >= 0.0);
      }
  }
}

TEST_CASE("general Dirichlet mean") {
  RandomStream s(13, 0);
  const std::vector<double> params{1.0, 2.0, 3.0};
  double m2 = 0.0;
  constexpr int n = 50000;
  for (int i = 0; i < n; ++i) m2 += sample_dirichlet(s, params)[2];
  CHECK(std::fabs(m2 / n - 0.5) < 0.01);
}
