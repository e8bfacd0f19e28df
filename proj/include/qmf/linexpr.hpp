#pragma once

// Exact linear combinations over abstract register symbols x_0..x_{k-1}.
// Used by the symbolic executors that check adder schedules and the
// bundled parallel sequences.

#include <cstddef>
#include <string>
#include <vector>

#include "qmf/rational.hpp"

namespace qmf {

class LinExpr {
public:
  LinExpr() = default;
  explicit LinExpr(std::size_t nsyms) : coeffs_(nsyms) {}

  static LinExpr symbol(std::size_t nsyms, std::size_t i) {
    LinExpr e(nsyms);
    e.coeffs_[i] = Rational(1);
    return e;
  }

  std::size_t size() const { return coeffs_.size(); }
  const Rational& coeff(std::size_t i) const { return coeffs_[i]; }
  Rational& coeff(std::size_t i) { return coeffs_[i]; }

  void add_scaled(const LinExpr& other, const Rational& factor) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      coeffs_[i] += other.coeffs_[i] * factor;
  }
  void scale(const Rational& factor) {
    for (auto& c : coeffs_) c *= factor;
  }
  void negate() { scale(Rational(-1)); }

  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (!c.is_zero()) return false;
    return true;
  }
  bool all_integer() const {
    for (const auto& c : coeffs_)
      if (!c.is_integer()) return false;
    return true;
  }

  friend bool operator==(const LinExpr& a, const LinExpr& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const LinExpr& a, const LinExpr& b) { return !(a == b); }

  // If *this == lambda * other for a scalar lambda != 0, returns true and
  // sets lambda. Zero expressions are not proportional to anything.
  bool proportional_to(const LinExpr& other, Rational& lambda) const {
    if (is_zero() || other.is_zero()) return false;
    std::size_t pivot = 0;
    while (pivot < size() && other.coeffs_[pivot].is_zero()) ++pivot;
    if (pivot == size() || coeffs_[pivot].is_zero()) return false;
    lambda = coeffs_[pivot] / other.coeffs_[pivot];
    for (std::size_t i = 0; i < size(); ++i)
      if (coeffs_[i] != lambda * other.coeffs_[i]) return false;
    return true;
  }

  std::string to_string(const std::string& sym = "x") const {
    std::string s;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i].is_zero()) continue;
      if (!s.empty()) s += " + ";
      s += coeffs_[i].to_string() + "*" + sym + std::to_string(i);
    }
    return s.empty() ? "0" : s;
  }

private:
  std::vector<Rational> coeffs_;
};

// True when r == +/- 2^j for integer j (including negative j).
inline bool is_pm_power_of_two(const Rational& r) {
  if (r.is_zero()) return false;
  const BigInt num = r.num().abs();
  const BigInt& den = r.den();
  auto pow2_check = [](const BigInt& v) {
    if (v.is_zero()) return false;
    return v == BigInt::pow2(v.bit_length() - 1);
  };
  return pow2_check(num) && pow2_check(den);
}

}  // namespace qmf
