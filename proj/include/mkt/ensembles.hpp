#pragma once

#include <cstddef>
#include <string>

#include "mkt/measure.hpp"
#include "mkt/rng.hpp"
#include "mkt/tridiag.hpp"

namespace mkt {

enum class EnsembleModel { gaussian, laguerre, jacobi };

std::string to_string(EnsembleModel m);
EnsembleModel parse_ensemble_model(const std::string& name);

/// One of the three classical beta ensembles at inverse temperature
/// beta = 2c/N.
struct EnsembleSpec {
  EnsembleModel model = EnsembleModel::gaussian;
  std::size_t n = 1;
  double c = 1.0;
  double alpha = 1.0;  // Laguerre, > 0
  double a = 0.0;      // Jacobi, > -1
  double b = 0.0;      // Jacobi, > -1

  static EnsembleSpec gaussian(std::size_t n, double c) { return {EnsembleModel::gaussian, n, c}; }
  static EnsembleSpec laguerre(std::size_t n, double c, double alpha) {
    return {EnsembleModel::laguerre, n, c, alpha};
  }
  static EnsembleSpec jacobi(std::size_t n, double c, double a, double b) {
    return {EnsembleModel::jacobi, n, c, 1.0, a, b};
  }

  double beta() const { return 2.0 * c / static_cast<double>(n); }
  void validate() const;
};

/// Diagonal N(0,1), sub-diagonal b_i ~ chi_tilde_{(N-i) beta}.
TridiagonalMatrix build_gaussian(const EnsembleSpec& spec, RandomStream& s);

/// B B^T with B lower bidiagonal, assembled entrywise:
/// diag_i = x_i^2 + y_{i-1}^2, offdiag_i = x_i y_i, x_i ~ chi_tilde_{2 alpha + beta (N-i)},
/// y_i ~ chi_tilde_{beta (N-i)}.
TridiagonalMatrix build_laguerre(const EnsembleSpec& spec, RandomStream& s);

/// Killip-Nenciu model: p_n, q_n beta draws, s_n = p_n (1 - q_{n-1}),
/// t_n = q_n (1 - p_n), diag_n = s_n + t_{n-1}, offdiag_n = sqrt(s_n t_n).
TridiagonalMatrix build_jacobi(const EnsembleSpec& spec, RandomStream& s);

/// Dispatch on spec.model.
TridiagonalMatrix build_matrix(const EnsembleSpec& spec, RandomStream& s);

/// nu = sum_i w_i delta_{lambda_i}, w_i the squared first eigenvector entries.
AtomicMeasure spectral_measure(const TridiagonalMatrix& t);

}  // namespace mkt
