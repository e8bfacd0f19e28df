#pragma once

// Exact rationals over BigInt. Always reduced, denominator > 0, zero is 0/1.

#include <stdexcept>

#include "qmf/bigint.hpp"

namespace qmf {

class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t v) : num_(v), den_(1) {}
  Rational(BigInt n) : num_(std::move(n)), den_(1) {}
  Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_integer() const { return den_ == BigInt(1); }
  bool is_negative() const { return num_.is_negative(); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational: division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  Rational operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
  }
  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }
  Rational& operator*=(const Rational& b) { return *this = *this * b; }
  Rational& operator/=(const Rational& b) { return *this = *this / b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return (a - b).num_.is_negative();
  }

  double to_double() const {
    if (num_.is_zero()) return 0.0;
    // Align magnitudes so the 64-bit leading chunks carry the precision.
    std::ptrdiff_t nb = static_cast<std::ptrdiff_t>(num_.bit_length());
    std::ptrdiff_t db = static_cast<std::ptrdiff_t>(den_.bit_length());
    BigInt n = num_.abs(), d = den_;
    std::ptrdiff_t exp = 0;
    if (nb > 62) {
      n = n >> (nb - 62);
      exp += nb - 62;
    }
    if (db > 62) {
      d = d >> (db - 62);
      exp -= db - 62;
    }
    double r = static_cast<double>(n.to_u64()) / static_cast<double>(d.to_u64());
    r = std::ldexp(r, static_cast<int>(exp));
    return num_.is_negative() ? -r : r;
  }

  std::string to_string() const {
    if (is_integer()) return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
  }

  std::size_t hash() const { return num_.hash() * 31 + den_.hash(); }

private:
  BigInt num_, den_;

  void normalize() {
    if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
    if (den_.is_negative()) {
      num_ = -num_;
      den_ = -den_;
    }
    if (num_.is_zero()) {
      den_ = BigInt(1);
      return;
    }
    BigInt g = BigInt::gcd(num_, den_);
    if (!(g == BigInt(1))) {
      num_ = num_ / g;
      den_ = den_ / g;
    }
  }
};

}  // namespace qmf
