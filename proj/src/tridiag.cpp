#include "mkt/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mkt/errors.hpp"

namespace mkt {

void TridiagonalMatrix::validate() const {
  if (diag.empty()) throw ParameterError("tridiagonal matrix must be at least 1x1");
  if (offdiag.size() + 1 != diag.size())
    throw ParameterError("tridiagonal matrix: offdiag must have length N - 1");
  for (double d : diag)
    if (!std::isfinite(d)) throw ParameterError("tridiagonal matrix: non-finite diagonal entry");
  for (double e : offdiag)
    if (!std::isfinite(e) || e < 0.0)
      throw ParameterError("tridiagonal matrix: off-diagonal entries must be finite and >= 0");
}

double TridiagonalMatrix::power_entry_00(std::size_t k) const {
  const std::size_t n = size();
  std::vector<double> v(n, 0.0), w(n);
  v[0] = 1.0;
  for (std::size_t step = 0; step < k; ++step) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = diag[i] * v[i];
      if (i > 0) acc += offdiag[i - 1] * v[i - 1];
      if (i + 1 < n) acc += offdiag[i] * v[i + 1];
      w[i] = acc;
    }
    std::swap(v, w);
  }
  return v[0];
}

TridiagEigen tridiag_eigen(const TridiagonalMatrix& t, int max_sweeps) {
  t.validate();
  const std::size_t n = t.size();
  std::vector<double> d = t.diag;
  std::vector<double> e(n, 0.0);
  std::copy(t.offdiag.begin(), t.offdiag.end(), e.begin());
  std::vector<double> z(n, 0.0);
  z[0] = 1.0;

  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t l = 0; l < n; ++l) {
    int sweeps = 0;
    std::size_t m;
    for (;;) {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (sweeps++ == max_sweeps) {
        std::ostringstream msg;
        msg << "tridiag_eigen: no convergence for eigenvalue " << l << " of " << n << " after "
            << max_sweeps << " sweeps (|e| = " << std::fabs(e[l]) << ", d = " << d[l] << ")";
        throw NumericalError(msg.str());
      }
      // Shift from the leading 2x2 block.
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t ii = m; ii-- > l;) {
        const std::size_t i = ii;
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        f = z[i + 1];
        z[i + 1] = s * z[i] + c * f;
        z[i] = c * z[i] - s * f;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  TridiagEigen out;
  out.eigenvalues.resize(n);
  out.first_components_sq.resize(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = d[order[k]];
    out.first_components_sq[k] = z[order[k]] * z[order[k]];
    total += out.first_components_sq[k];
  }
  // The rotations are orthogonal, so this only removes accumulated round-off.
  for (auto& w : out.first_components_sq) w /= total;
  return out;
}

}  // namespace mkt
