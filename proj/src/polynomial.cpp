#include "mkt/polynomial.hpp"

#include <algorithm>

namespace mkt {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double Polynomial::derivative(double t) const {
  double acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * t + static_cast<double>(k) * coeffs_[k];
  return acc;
}

Polynomial Polynomial::integral() const {
  std::vector<double> out(coeffs_.size() + 1, 0.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) out[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
  return Polynomial(std::move(out));
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (auto& v : coeffs_) v *= s;
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.coeffs_.empty() || b.coeffs_.empty()) return {};
  std::vector<double> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(out));
}

}  // namespace mkt
