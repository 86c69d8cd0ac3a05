#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "mkt/ensembles.hpp"
#include "mkt/errors.hpp"
#include "mkt/measure.hpp"
#include "mkt/tridiag.hpp"

using namespace mkt;
using cd = std::complex<double>;

namespace {

TridiagonalMatrix random_tridiag(RandomStream& s, std::size_t n) {
  TridiagonalMatrix t;
  for (std::size_t i = 0; i < n; ++i) t.diag.push_back(s.normal());
  for (std::size_t i = 0; i + 1 < n; ++i) t.offdiag.push_back(0.1 + s.uniform());
  return t;
}

double weighted_moment(const AtomicMeasure& m, int k) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) acc += m.weights()[i] * std::pow(m.locations()[i], k);
  return acc;
}

}  // namespace

TEST_CASE("eigen solver on small closed forms") {
  SUBCASE("1x1") {
    const auto e = tridiag_eigen({{2.5}, {}});
    CHECK(e.eigenvalues == std::vector<double>{2.5});
    CHECK(e.first_components_sq == std::vector<double>{1.0});
  }
  SUBCASE("2x2 symmetric pair") {
    const auto e = tridiag_eigen({{0.0, 0.0}, {1.0}});
    CHECK(e.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.first_components_sq[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(e.first_components_sq[1] == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("3x3 path graph") {
    const auto e = tridiag_eigen({{0.0, 0.0, 0.0}, {1.0, 1.0}});
    CHECK(e.eigenvalues[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::fabs(e.eigenvalues[1]) < 1e-14);
    CHECK(e.eigenvalues[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(e.first_components_sq[0] == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(e.first_components_sq[1] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(e.first_components_sq[2] == doctest::Approx(0.25).epsilon(1e-13));
    const auto nu = spectral_measure({{0.0, 0.0, 0.0}, {1.0, 1.0}});
    CHECK(moments_of_measure(nu, 2)[2] == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("random 2x2 against the quadratic formula") {
    RandomStream s(21, 0);
    for (int k = 0; k < 200; ++k) {
      const auto t = random_tridiag(s, 2);
      const double a = t.diag[0], d = t.diag[1], b = t.offdiag[0];
      const double mid = 0.5 * (a + d), rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
      const auto e = tridiag_eigen(t);
      CHECK(std::fabs(e.eigenvalues[0] - (mid - rad)) < 1e-10);
      CHECK(std::fabs(e.eigenvalues[1] - (mid + rad)) < 1e-10);
    }
  }
  SUBCASE("random 3x3 against the characteristic polynomial") {
    RandomStream s(22, 0);
    for (int k = 0; k < 200; ++k) {
      const auto t = random_tridiag(s, 3);
      const auto e = tridiag_eigen(t);
      const double a = t.diag[0], b = t.diag[1], c = t.diag[2], p = t.offdiag[0], q = t.offdiag[1];
      for (double x : e.eigenvalues) {
        const double det = (a - x) * ((b - x) * (c - x) - q * q) - p * p * (c - x);
        CHECK(std::fabs(det) < 1e-10);
      }
      CHECK(std::fabs(e.eigenvalues[0] + e.eigenvalues[1] + e.eigenvalues[2] - (a + b + c)) < 1e-10);
    }
  }
}

TEST_CASE("spectral measure moments equal (J^k)(1,1)") {
  RandomStream s(23, 0);
  for (std::size_t n : {1u, 2u, 5u, 17u, 30u}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto t = random_tridiag(s, n);
      const auto e = tridiag_eigen(t);
      CHECK(std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end()));
      const double wsum = std::accumulate(e.first_components_sq.begin(), e.first_components_sq.end(), 0.0);
      CHECK(std::fabs(wsum - 1.0) < 1e-10);
      const auto nu = spectral_measure(t);
      CHECK(std::fabs(weighted_moment(nu, 1) - t.diag[0]) < 1e-10);
      if (n > 1)
        CHECK(std::fabs(weighted_moment(nu, 2) - (t.diag[0] * t.diag[0] + t.offdiag[0] * t.offdiag[0])) < 1e-10);
      for (int k = 0; k <= 6; ++k) {
        const double direct = t.power_entry_00(static_cast<std::size_t>(k));
        CHECK(std::fabs(weighted_moment(nu, k) - direct) < 1e-8 * std::max(1.0, std::fabs(direct)));
      }
    }
  }
}

TEST_CASE("tridiagonal validation") {
  CHECK_THROWS_AS((TridiagonalMatrix{{1.0, 2.0}, {-1.0}}.validate()), ParameterError);
  CHECK_THROWS_AS((TridiagonalMatrix{{1.0, 2.0}, {}}.validate()), ParameterError);
  CHECK_THROWS_AS((TridiagonalMatrix{{}, {}}.validate()), ParameterError);
  CHECK_NOTHROW((TridiagonalMatrix{{1.0, 2.0}, {0.0}}.validate()));
}

TEST_CASE("atomic measures") {
  SUBCASE("merging and sorting") {
    AtomicMeasure m({1.0, 0.0, 1.0 + 1e-14}, {0.25, 0.5, 0.25});
    REQUIRE(m.size() == 2);
    CHECK(m.locations()[0] == 0.0);
    CHECK(m.weights()[1] == doctest::Approx(0.5));
  }
  CHECK_THROWS_AS(AtomicMeasure({0.0, 1.0}, {0.5, 0.6}), ParameterError);
  CHECK_THROWS_AS(AtomicMeasure({0.0, 1.0}, {1.5, -0.5}), ParameterError);
  CHECK_THROWS_AS(empirical_measure(std::vector<double>{}), ParameterError);

  const auto five = empirical_measure(std::vector<double>{5.0});
  CHECK(five.size() == 1);
  CHECK(five.locations()[0] == 5.0);
  const auto pair = empirical_measure(std::vector<double>{0.0, 1.0});
  const auto mp = moments_of_measure(pair, 4);
  for (std::size_t n = 1; n <= 4; ++n) CHECK(mp[n] == doctest::Approx(0.5));
  const auto da = moments_of_measure(AtomicMeasure::point(1.5), 3);
  CHECK(da[0] == 1.0);
  CHECK(da[1] == 1.5);
  CHECK(da[2] == 2.25);
  CHECK(da[3] == 3.375);
}

TEST_CASE("principal branch transforms") {
  const auto d0 = AtomicMeasure::point(0.0);
  const auto d1 = AtomicMeasure::point(1.0);
  const auto pair = empirical_measure(std::vector<double>{0.0, 1.0});
  CHECK(std::abs(gen_stieltjes(d0, cd(0, 2), 1.0) - cd(0, -0.5)) < 1e-15);
  CHECK(std::abs(gen_stieltjes(d1, cd(1, 1), 2.0) - cd(-1, 0)) < 1e-15);
  CHECK(std::abs(gen_stieltjes(pair, cd(0, 2), 1.0) - 0.5 * (1.0 / cd(0, 2) + 1.0 / cd(-1, 2))) < 1e-15);
  CHECK(std::abs(log_potential(d0, cd(0, 2)) - cd(std::log(2.0), std::numbers::pi / 2)) < 1e-15);
  CHECK(std::abs(log_potential(AtomicMeasure::point(3.7), cd(3.7, 1)) - cd(0, std::numbers::pi / 2)) < 1e-15);
  CHECK(std::abs(log_potential(pair, cd(3, 4)) - 0.5 * (std::log(cd(3, 4)) + std::log(cd(2, 4)))) < 1e-15);
  CHECK_THROWS_AS(gen_stieltjes(d0, cd(2, 0), 1.0), DomainError);
  CHECK_THROWS_AS(log_potential(d0, cd(2, 0)), DomainError);
  CHECK_THROWS_AS(principal_log(cd(-1, 0)), DomainError);
  CHECK_THROWS_AS(gen_stieltjes(d0, cd(0, 1), 0.0), ParameterError);
}

TEST_CASE("ensemble parameter validation") {
  RandomStream s(1, 0);
  CHECK_THROWS_AS(build_matrix(EnsembleSpec::gaussian(0, 1.0), s), ParameterError);
  CHECK_THROWS_AS(build_matrix(EnsembleSpec::gaussian(5, 0.0), s), ParameterError);
  CHECK_THROWS_AS(build_matrix(EnsembleSpec::laguerre(5, 1.0, 0.0), s), ParameterError);
  CHECK_THROWS_AS(build_matrix(EnsembleSpec::jacobi(5, 1.0, -1.0, 0.0), s), ParameterError);
  CHECK(parse_ensemble_model("laguerre") == EnsembleModel::laguerre);
  CHECK_THROWS_AS(parse_ensemble_model("wishart"), ParameterError);
}

TEST_CASE("Gaussian model moments") {
  constexpr int reps = 10000;
  const auto spec = EnsembleSpec::gaussian(50, 1.0);
  double tr1 = 0.0, tr2 = 0.0, one = 0.0;
  for (int r = 0; r < reps; ++r) {
    RandomStream s(31, r);
    const auto t = build_gaussian(spec, s);
    for (double d : t.diag) {
      tr1 += d;
      tr2 += d * d;
    }
    for (double b : t.offdiag) tr2 += 2.0 * b * b;
    RandomStream s1(32, r);
    one += build_gaussian(EnsembleSpec::gaussian(1, 1.0), s1).diag[0];
  }
  CHECK(std::fabs(tr1 / reps / 50.0) < 0.01);
  CHECK(std::fabs(tr2 / reps / 50.0 - 1.98) < 0.05);
  CHECK(std::fabs(one / reps) < 4.0 / std::sqrt(double(reps)));
}

TEST_CASE("Laguerre model moments and support") {
  constexpr int reps = 10000;
  const std::size_t n = 50;
  const double alpha = 2.0, c = 1.0, beta = 2.0 * c / n;
  double exact = 0.0;  // sum_i E(x_i^2 + y_{i-1}^2) / N
  for (std::size_t i = 1; i <= n; ++i) {
    exact += alpha + beta * double(n - i) / 2.0;
    if (i > 1) exact += beta * double(n - i + 1) / 2.0;
  }
  exact /= double(n);
  double tr = 0.0, tr_sq = 0.0, one = 0.0;
  for (int r = 0; r < reps; ++r) {
    RandomStream s(41, r);
    const auto t = build_laguerre(EnsembleSpec::laguerre(n, c, alpha), s);
    const double v = std::accumulate(t.diag.begin(), t.diag.end(), 0.0) / double(n);
    tr += v;
    tr_sq += v * v;
    RandomStream s1(42, r);
    one += build_laguerre(EnsembleSpec::laguerre(1, c, alpha), s1).diag[0];
  }
  const double mean = tr / reps, se = std::sqrt((tr_sq / reps - mean * mean) / reps);
  CHECK(std::fabs(mean - exact) < 4.0 * se);
  CHECK(std::fabs(one / reps - alpha) < 4.0 * std::sqrt(alpha / reps));

  for (int r = 0; r < 300; ++r) {
    RandomStream s(43, r);
    const auto e = tridiag_eigen(build_laguerre(EnsembleSpec::laguerre(30, 0.5, 0.7), s));
    REQUIRE(e.eigenvalues.front() >= -1e-10);
  }
}

TEST_CASE("Jacobi model support and N = 1 law") {
  for (int r = 0; r < 1000; ++r) {
    RandomStream s(51, r);
    const auto t = build_jacobi(EnsembleSpec::jacobi(20, 1.0, 0.3, -0.4), s);
    for (double b : t.offdiag) REQUIRE(b >= 0.0);
    const auto e = tridiag_eigen(t);
    REQUIRE(e.eigenvalues.front() >= -1e-10);
    REQUIRE(e.eigenvalues.back() <= 1.0 + 1e-10);
  }
  constexpr int reps = 20000;
  double m = 0.0;
  for (int r = 0; r < reps; ++r) {
    RandomStream s(52, r);
    m += build_jacobi(EnsembleSpec::jacobi(1, 1.0, 1.0, 2.0), s).diag[0];
  }
  // Beta(2, 3): mean 0.4, variance 0.04
  CHECK(std::fabs(m / reps - 0.4) < 4.0 * std::sqrt(0.04 / reps));
}

TEST_CASE("Gaussian spectral weights are symmetric Dirichlet(c/N)") {
  constexpr int reps = 20000;
  const std::size_t n = 8;
  const double c = 1.5, kappa = c / double(n);
  double w1 = 0.0, w1sq = 0.0, cross = 0.0;
  for (int r = 0; r < reps; ++r) {
    RandomStream s(61, r);
    const auto e = tridiag_eigen(build_gaussian(EnsembleSpec::gaussian(n, c), s));
    // weight attached to the largest eigenvalue, against that eigenvalue
    const double w = e.first_components_sq.back();
    w1 += w;
    w1sq += w * w;
    cross += w * e.eigenvalues.back();
  }
  const double mean = w1 / reps;
  const double second = w1sq / reps;
  const double var_w = second - mean * mean;
  CHECK(std::fabs(mean - 1.0 / double(n)) < 4.0 * std::sqrt(var_w / reps));
  // E w^2 for Dirichlet(kappa, ..., kappa): (kappa+1) / (n (n kappa + 1))
  const double expected_second = (kappa + 1.0) / (double(n) * (double(n) * kappa + 1.0));
  CHECK(std::fabs(second - expected_second) < 4.0 * std::sqrt(var_w * 4.0 * second / reps) + 1e-3);
}

TEST_CASE("sampling is reproducible per replica") {
  RandomStream a(77, 3), b(77, 3);
  const auto ta = build_jacobi(EnsembleSpec::jacobi(40, 2.0, 0.5, 0.5), a);
  const auto tb = build_jacobi(EnsembleSpec::jacobi(40, 2.0, 0.5, 0.5), b);
  CHECK(ta.diag == tb.diag);
  CHECK(ta.offdiag == tb.offdiag);
}
