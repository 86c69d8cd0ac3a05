#pragma once

#include <cstddef>
#include <vector>

namespace mkt {

/// Dense real polynomial in t, coefficients in increasing degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);
  static Polynomial constant(double v) { return Polynomial({v}); }

  double operator()(double t) const;
  /// Derivative evaluated at t.
  double derivative(double t) const;
  std::size_t degree() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }

  /// Antiderivative vanishing at t = 0.
  Polynomial integral() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  void trim();
  std::vector<double> coeffs_;
};

}  // namespace mkt
