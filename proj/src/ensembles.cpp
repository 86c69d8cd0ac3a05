#include "mkt/ensembles.hpp"

#include <cmath>

#include "mkt/errors.hpp"

namespace mkt {

std::string to_string(EnsembleModel m) {
  switch (m) {
    case EnsembleModel::gaussian: return "gaussian";
    case EnsembleModel::laguerre: return "laguerre";
    case EnsembleModel::jacobi: return "jacobi";
  }
  return "?";
}

EnsembleModel parse_ensemble_model(const std::string& name) {
  if (name == "gaussian") return EnsembleModel::gaussian;
  if (name == "laguerre") return EnsembleModel::laguerre;
  if (name == "jacobi") return EnsembleModel::jacobi;
  throw ParameterError("unknown ensemble model '" + name + "'");
}

void EnsembleSpec::validate() const {
  require(n >= 1, "ensemble: N must be >= 1");
  require(c > 0.0 && std::isfinite(c), "ensemble: c must be > 0");
  switch (model) {
    case EnsembleModel::gaussian: break;
    case EnsembleModel::laguerre: require(alpha > 0.0, "Laguerre ensemble: alpha must be > 0"); break;
    case EnsembleModel::jacobi:
      require(a > -1.0 && b > -1.0, "Jacobi ensemble: a and b must be > -1");
      break;
  }
}

TridiagonalMatrix build_gaussian(const EnsembleSpec& spec, RandomStream& s) {
  require(spec.model == EnsembleModel::gaussian, "build_gaussian: wrong model");
  spec.validate();
  const std::size_t n = spec.n;
  const double beta = spec.beta();
  TridiagonalMatrix t;
  t.diag.resize(n);
  t.offdiag.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) t.diag[i] = s.normal();
  // 0-based i holds b_{i+1} ~ chi_tilde_{(N - i - 1) beta}
  for (std::size_t i = 0; i + 1 < n; ++i)
    t.offdiag[i] = sample_chi_tilde(s, static_cast<double>(n - i - 1) * beta);
  return t;
}

TridiagonalMatrix build_laguerre(const EnsembleSpec& spec, RandomStream& s) {
  require(spec.model == EnsembleModel::laguerre, "build_laguerre: wrong model");
  spec.validate();
  const std::size_t n = spec.n;
  const double beta = spec.beta();
  std::vector<double> x(n), y(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = sample_chi_tilde(s, 2.0 * spec.alpha + beta * static_cast<double>(n - i - 1));
  for (std::size_t i = 0; i + 1 < n; ++i)
    y[i] = sample_chi_tilde(s, beta * static_cast<double>(n - i - 1));

  TridiagonalMatrix t;
  t.diag.resize(n);
  t.offdiag.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    t.diag[i] = x[i] * x[i];
    if (i > 0) t.diag[i] += y[i - 1] * y[i - 1];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) t.offdiag[i] = x[i] * y[i];
  return t;
}

TridiagonalMatrix build_jacobi(const EnsembleSpec& spec, RandomStream& s) {
  require(spec.model == EnsembleModel::jacobi, "build_jacobi: wrong model");
  spec.validate();
  const std::size_t n = spec.n;
  const double half_beta = 0.5 * spec.beta();
  const double a = spec.a, b = spec.b;

  // 1-based index k = i + 1; (N - k) beta / 2 = (n - i - 1) half_beta.
  std::vector<BetaDraw> p(n), q(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(n - i - 1) * half_beta;
    p[i] = sample_beta_pair(s, k + a + 1.0, k + b + 1.0);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double k = static_cast<double>(n - i - 1) * half_beta;
    const double k1 = static_cast<double>(n - i - 2) * half_beta;
    q[i] = sample_beta_pair(s, k, k1 + a + b + 2.0);
  }

  std::vector<double> sn(n), tn(n - 1);
  for (std::size_t i = 0; i < n; ++i) sn[i] = p[i].value * (i == 0 ? 1.0 : q[i - 1].complement);
  for (std::size_t i = 0; i + 1 < n; ++i) tn[i] = q[i].value * p[i].complement;

  TridiagonalMatrix t;
  t.diag.resize(n);
  t.offdiag.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) t.diag[i] = sn[i] + (i > 0 ? tn[i - 1] : 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) t.offdiag[i] = std::sqrt(sn[i] * tn[i]);
  return t;
}

TridiagonalMatrix build_matrix(const EnsembleSpec& spec, RandomStream& s) {
  switch (spec.model) {
    case EnsembleModel::gaussian: return build_gaussian(spec, s);
    case EnsembleModel::laguerre: return build_laguerre(spec, s);
    case EnsembleModel::jacobi: return build_jacobi(spec, s);
  }
  throw ParameterError("build_matrix: unknown model");
}

AtomicMeasure spectral_measure(const TridiagonalMatrix& t) {
  auto eig = tridiag_eigen(t);
  return AtomicMeasure(std::move(eig.eigenvalues), std::move(eig.first_components_sq));
}

}  // namespace mkt
