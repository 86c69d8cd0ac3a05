#pragma once

#include <cstddef>
#include <vector>

namespace mkt {

/// Symmetric tridiagonal (Jacobi) matrix: diag of length N, offdiag of
/// length N - 1. Only the sub-diagonal is stored.
struct TridiagonalMatrix {
  std::vector<double> diag;
  std::vector<double> offdiag;

  std::size_t size() const { return diag.size(); }

  /// Throws ParameterError unless sizes agree, entries are finite and the
  /// off-diagonal is nonnegative. A zero off-diagonal entry is accepted: it
  /// only appears when a chi draw underflows and simply splits the matrix.
  void validate() const;

  /// Row-0 entry of T^k, computed by repeated matrix-vector products.
  double power_entry_00(std::size_t k) const;
};

struct TridiagEigen {
  std::vector<double> eigenvalues;          // ascending
  std::vector<double> first_components_sq;  // squared first eigenvector entries
};

inline constexpr int kDefaultMaxSweeps = 50;

/**
 * Eigenvalues and squared first eigenvector components of a symmetric
 * tridiagonal matrix.
 *
 * Implicit QL with Wilkinson-type shifts. Only the first row of the
 * accumulated rotation product is tracked (Golub-Welsch), so the cost is
 * O(N^2) and no eigenvector matrix is ever stored. Throws NumericalError if
 * some eigenvalue needs more than `max_sweeps` QL sweeps.
 */
TridiagEigen tridiag_eigen(const TridiagonalMatrix& t, int max_sweeps = kDefaultMaxSweeps);

}  // namespace mkt
