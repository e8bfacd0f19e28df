#pragma once

// Arbitrary-precision signed integers. Sign-magnitude over 32-bit limbs,
// little-endian limb order. Only what the exact Toom/rational layer needs:
// add, sub, schoolbook mul, divmod (Knuth D), shifts, pow, bit access.

#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmf {

class BigInt {
public:
  BigInt() = default;
  BigInt(std::int64_t v) {
    if (v < 0) {
      neg_ = true;
      // avoid UB on INT64_MIN
      std::uint64_t m = static_cast<std::uint64_t>(-(v + 1)) + 1;
      push_u64(m);
    } else {
      push_u64(static_cast<std::uint64_t>(v));
    }
    trim();
  }

  static BigInt from_u64(std::uint64_t v) {
    BigInt r;
    r.push_u64(v);
    r.trim();
    return r;
  }

  // Parses decimal, with optional leading '-'.
  static BigInt from_string(const std::string& s) {
    BigInt r;
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
      neg = s[i] == '-';
      ++i;
    }
    if (i == s.size()) throw std::invalid_argument("BigInt: empty string");
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("BigInt: bad digit");
      r.mul_small(10);
      r.add_small(static_cast<std::uint32_t>(s[i] - '0'));
    }
    r.neg_ = neg && !r.is_zero();
    return r;
  }

  bool is_zero() const { return limbs_.empty(); }
  bool is_negative() const { return neg_; }
  int sign() const { return is_zero() ? 0 : (neg_ ? -1 : 1); }

  // Number of bits in the magnitude; 0 for zero.
  std::size_t bit_length() const {
    if (limbs_.empty()) return 0;
    std::uint32_t top = limbs_.back();
    std::size_t b = 32;
    while (!(top & 0x80000000u)) {
      top <<= 1;
      --b;
    }
    return (limbs_.size() - 1) * 32 + b;
  }

  bool bit(std::size_t i) const {
    std::size_t limb = i / 32;
    if (limb >= limbs_.size()) return false;
    return (limbs_[limb] >> (i % 32)) & 1u;
  }

  bool is_odd() const { return bit(0); }

  // Magnitude fits in 64 bits?
  bool fits_u64() const { return limbs_.size() <= 2; }
  std::uint64_t to_u64() const {
    std::uint64_t v = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) v = (v << 32) | limbs_[i];
    return v;
  }
  std::int64_t to_i64() const {
    std::uint64_t m = to_u64();
    return neg_ ? -static_cast<std::int64_t>(m) : static_cast<std::int64_t>(m);
  }

  double to_double() const {
    // Magnitude via top bits; fine for comparisons and float conversion.
    if (is_zero()) return 0.0;
    double r = 0.0;
    std::size_t n = limbs_.size();
    std::size_t take = n > 3 ? 3 : n;
    for (std::size_t i = 0; i < take; ++i)
      r = r * 4294967296.0 + static_cast<double>(limbs_[n - 1 - i]);
    r *= std::pow(4294967296.0, static_cast<double>(n - take));
    return neg_ ? -r : r;
  }

  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.neg_ == b.neg_ && a.limbs_ == b.limbs_;
  }
  friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
  friend bool operator<(const BigInt& a, const BigInt& b) {
    if (a.neg_ != b.neg_) return a.neg_;
    int c = cmp_mag(a, b);
    return a.neg_ ? c > 0 : c < 0;
  }
  friend bool operator>(const BigInt& a, const BigInt& b) { return b < a; }
  friend bool operator<=(const BigInt& a, const BigInt& b) { return !(b < a); }
  friend bool operator>=(const BigInt& a, const BigInt& b) { return !(a < b); }

  BigInt operator-() const {
    BigInt r = *this;
    if (!r.is_zero()) r.neg_ = !r.neg_;
    return r;
  }

  BigInt abs() const {
    BigInt r = *this;
    r.neg_ = false;
    return r;
  }

  friend BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.neg_ == b.neg_) {
      BigInt r = add_mag(a, b);
      r.neg_ = a.neg_ && !r.is_zero();
      return r;
    }
    int c = cmp_mag(a, b);
    if (c == 0) return BigInt();
    if (c > 0) {
      BigInt r = sub_mag(a, b);
      r.neg_ = a.neg_ && !r.is_zero();
      return r;
    }
    BigInt r = sub_mag(b, a);
    r.neg_ = b.neg_ && !r.is_zero();
    return r;
  }
  friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

  friend BigInt operator*(const BigInt& a, const BigInt& b) {
    if (a.is_zero() || b.is_zero()) return BigInt();
    BigInt r;
    r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
      std::uint64_t carry = 0;
      std::uint64_t ai = a.limbs_[i];
      for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
        std::uint64_t cur = r.limbs_[i + j] + ai * b.limbs_[j] + carry;
        r.limbs_[i + j] = static_cast<std::uint32_t>(cur);
        carry = cur >> 32;
      }
      std::size_t k = i + b.limbs_.size();
      while (carry) {
        std::uint64_t cur = r.limbs_[k] + carry;
        r.limbs_[k] = static_cast<std::uint32_t>(cur);
        carry = cur >> 32;
        ++k;
      }
    }
    r.trim();
    r.neg_ = (a.neg_ != b.neg_) && !r.is_zero();
    return r;
  }

  BigInt& operator+=(const BigInt& b) { return *this = *this + b; }
  BigInt& operator-=(const BigInt& b) { return *this = *this - b; }
  BigInt& operator*=(const BigInt& b) { return *this = *this * b; }

  BigInt operator<<(std::size_t bits) const {
    if (is_zero() || bits == 0) return *this;
    BigInt r;
    std::size_t limb_shift = bits / 32, bit_shift = bits % 32;
    r.limbs_.assign(limbs_.size() + limb_shift + 1, 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
      std::uint64_t v = static_cast<std::uint64_t>(limbs_[i]) << bit_shift;
      r.limbs_[i + limb_shift] |= static_cast<std::uint32_t>(v);
      r.limbs_[i + limb_shift + 1] |= static_cast<std::uint32_t>(v >> 32);
    }
    r.trim();
    r.neg_ = neg_;
    return r;
  }

  // Arithmetic right shift of the magnitude (use on nonnegative values).
  BigInt operator>>(std::size_t bits) const {
    if (is_zero()) return *this;
    std::size_t limb_shift = bits / 32, bit_shift = bits % 32;
    if (limb_shift >= limbs_.size()) return BigInt();
    BigInt r;
    r.limbs_.assign(limbs_.size() - limb_shift, 0);
    for (std::size_t i = 0; i < r.limbs_.size(); ++i) {
      std::uint64_t v = limbs_[i + limb_shift] >> bit_shift;
      if (bit_shift && i + limb_shift + 1 < limbs_.size())
        v |= static_cast<std::uint64_t>(limbs_[i + limb_shift + 1]) << (32 - bit_shift);
      r.limbs_[i] = static_cast<std::uint32_t>(v);
    }
    r.trim();
    r.neg_ = neg_;
    return r;
  }

  static BigInt pow2(std::size_t e) { return BigInt(1) << e; }

  // Low `bits` bits of the magnitude.
  BigInt low_bits(std::size_t bits) const {
    BigInt r = *this;
    r.neg_ = false;
    std::size_t limbs = (bits + 31) / 32;
    if (r.limbs_.size() > limbs) r.limbs_.resize(limbs);
    std::size_t extra = limbs * 32 - bits;
    if (extra && r.limbs_.size() == limbs) r.limbs_.back() &= (0xFFFFFFFFu >> extra);
    r.trim();
    return r;
  }

  BigInt pow(unsigned e) const {
    BigInt base = *this, r(1);
    while (e) {
      if (e & 1) r *= base;
      base *= base;
      e >>= 1;
    }
    return r;
  }

  // Truncated quotient and remainder; remainder has the dividend's sign.
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.is_zero()) throw std::domain_error("BigInt: division by zero");
    int c = cmp_mag(a, b);
    if (c < 0) {
      q = BigInt();
      r = a;
      return;
    }
    if (b.limbs_.size() == 1) {
      divmod_small(a, b.limbs_[0], q, r);
    } else {
      divmod_knuth(a, b, q, r);
    }
    q.neg_ = (a.neg_ != b.neg_) && !q.is_zero();
    r.neg_ = a.neg_ && !r.is_zero();
  }

  friend BigInt operator/(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    return q;
  }
  friend BigInt operator%(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    return r;
  }

  static BigInt gcd(BigInt a, BigInt b) {
    a.neg_ = b.neg_ = false;
    while (!b.is_zero()) {
      BigInt q, r;
      divmod(a, b, q, r);
      a = b;
      b = r;
    }
    return a;
  }

  // Nonnegative remainder mod m (m > 0).
  static BigInt mod_floor(const BigInt& a, const BigInt& m) {
    BigInt r = a % m;
    if (r.is_negative()) r += m;
    return r;
  }

  // Modular inverse; throws if gcd(a, m) != 1.
  static BigInt mod_inverse(const BigInt& a, const BigInt& m) {
    BigInt old_r = mod_floor(a, m), r = m;
    BigInt old_s(1), s(0);
    while (!r.is_zero()) {
      BigInt q, rem;
      divmod(old_r, r, q, rem);
      BigInt tmp = old_s - q * s;
      old_r = r;
      r = rem;
      old_s = s;
      s = tmp;
    }
    if (!(old_r == BigInt(1))) throw std::domain_error("BigInt: no modular inverse");
    return mod_floor(old_s, m);
  }

  std::string to_string() const {
    if (is_zero()) return "0";
    BigInt t = *this;
    t.neg_ = false;
    std::string digits;
    while (!t.is_zero()) {
      std::uint32_t rem = t.divmod_small_inplace(1000000000u);
      if (t.is_zero()) {
        digits = std::to_string(rem) + digits;
      } else {
        std::string chunk = std::to_string(rem);
        digits = std::string(9 - chunk.size(), '0') + chunk + digits;
      }
    }
    return (neg_ ? "-" : "") + digits;
  }

  // Uniform in [0, 2^bits).
  template <class Rng>
  static BigInt random_bits(Rng& rng, std::size_t bits) {
    BigInt r;
    std::size_t limbs = (bits + 31) / 32;
    r.limbs_.resize(limbs);
    for (auto& l : r.limbs_) l = static_cast<std::uint32_t>(rng());
    std::size_t extra = limbs * 32 - bits;
    if (extra) r.limbs_.back() &= (0xFFFFFFFFu >> extra);
    r.trim();
    return r;
  }

  std::size_t hash() const {
    std::size_t h = neg_ ? 0x9e3779b97f4a7c15ull : 0;
    for (auto l : limbs_) h = h * 1000003ull + l;
    return h;
  }

private:
  std::vector<std::uint32_t> limbs_;
  bool neg_ = false;

  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) neg_ = false;
  }
  void push_u64(std::uint64_t v) {
    limbs_.push_back(static_cast<std::uint32_t>(v));
    limbs_.push_back(static_cast<std::uint32_t>(v >> 32));
  }
  void mul_small(std::uint32_t m) {
    std::uint64_t carry = 0;
    for (auto& l : limbs_) {
      std::uint64_t cur = static_cast<std::uint64_t>(l) * m + carry;
      l = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
    }
    if (carry) limbs_.push_back(static_cast<std::uint32_t>(carry));
    trim();
  }
  void add_small(std::uint32_t v) {
    std::uint64_t carry = v;
    for (std::size_t i = 0; carry && i < limbs_.size(); ++i) {
      std::uint64_t cur = limbs_[i] + carry;
      limbs_[i] = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
    }
    if (carry) limbs_.push_back(static_cast<std::uint32_t>(carry));
  }
  std::uint32_t divmod_small_inplace(std::uint32_t d) {
    std::uint64_t rem = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
      std::uint64_t cur = (rem << 32) | limbs_[i];
      limbs_[i] = static_cast<std::uint32_t>(cur / d);
      rem = cur % d;
    }
    trim();
    return static_cast<std::uint32_t>(rem);
  }

  static int cmp_mag(const BigInt& a, const BigInt& b) {
    if (a.limbs_.size() != b.limbs_.size())
      return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
    for (std::size_t i = a.limbs_.size(); i-- > 0;) {
      if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
    }
    return 0;
  }

  static BigInt add_mag(const BigInt& a, const BigInt& b) {
    const BigInt& big = a.limbs_.size() >= b.limbs_.size() ? a : b;
    const BigInt& small = a.limbs_.size() >= b.limbs_.size() ? b : a;
    BigInt r;
    r.limbs_ = big.limbs_;
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < small.limbs_.size(); ++i) {
      std::uint64_t cur = static_cast<std::uint64_t>(r.limbs_[i]) + small.limbs_[i] + carry;
      r.limbs_[i] = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
    }
    for (std::size_t i = small.limbs_.size(); carry && i < r.limbs_.size(); ++i) {
      std::uint64_t cur = static_cast<std::uint64_t>(r.limbs_[i]) + carry;
      r.limbs_[i] = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
    }
    if (carry) r.limbs_.push_back(static_cast<std::uint32_t>(carry));
    r.trim();
    return r;
  }

  // Requires |a| >= |b|.
  static BigInt sub_mag(const BigInt& a, const BigInt& b) {
    BigInt r;
    r.limbs_ = a.limbs_;
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < b.limbs_.size() || borrow; ++i) {
      std::int64_t cur = static_cast<std::int64_t>(r.limbs_[i]) - borrow -
                         (i < b.limbs_.size() ? b.limbs_[i] : 0);
      if (cur < 0) {
        cur += 0x100000000ll;
        borrow = 1;
      } else {
        borrow = 0;
      }
      r.limbs_[i] = static_cast<std::uint32_t>(cur);
    }
    r.trim();
    return r;
  }

  static void divmod_small(const BigInt& a, std::uint32_t d, BigInt& q, BigInt& r) {
    q = a;
    q.neg_ = false;
    std::uint32_t rem = q.divmod_small_inplace(d);
    r = BigInt(static_cast<std::int64_t>(rem));
  }

  // Knuth algorithm D over 32-bit limbs; |a| >= |b|, b has >= 2 limbs.
  static void divmod_knuth(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    std::size_t n = b.limbs_.size(), m = a.limbs_.size() - n;
    // Normalize so the divisor's top limb has its high bit set.
    std::uint32_t top = b.limbs_.back();
    std::size_t shift = 0;
    while (!(top & 0x80000000u)) {
      top <<= 1;
      ++shift;
    }
    BigInt u = a.abs() << shift;
    BigInt v = b.abs() << shift;
    u.limbs_.resize(n + m + 1, 0);

    q.limbs_.assign(m + 1, 0);
    q.neg_ = false;
    const std::uint64_t base = 0x100000000ull;
    for (std::size_t j = m + 1; j-- > 0;) {
      std::uint64_t num = (static_cast<std::uint64_t>(u.limbs_[j + n]) << 32) | u.limbs_[j + n - 1];
      std::uint64_t qhat = num / v.limbs_[n - 1];
      std::uint64_t rhat = num % v.limbs_[n - 1];
      while (qhat >= base ||
             qhat * v.limbs_[n - 2] > ((rhat << 32) | u.limbs_[j + n - 2])) {
        --qhat;
        rhat += v.limbs_[n - 1];
        if (rhat >= base) break;
      }
      // Multiply-subtract qhat * v from u[j .. j+n].
      std::int64_t borrow = 0;
      std::uint64_t carry = 0;
      for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t p = qhat * v.limbs_[i] + carry;
        carry = p >> 32;
        std::int64_t t = static_cast<std::int64_t>(u.limbs_[i + j]) -
                         static_cast<std::int64_t>(p & 0xFFFFFFFFull) - borrow;
        if (t < 0) {
          t += base;
          borrow = 1;
        } else {
          borrow = 0;
        }
        u.limbs_[i + j] = static_cast<std::uint32_t>(t);
      }
      std::int64_t t = static_cast<std::int64_t>(u.limbs_[j + n]) -
                       static_cast<std::int64_t>(carry) - borrow;
      if (t < 0) {
        // qhat was one too large; add v back.
        t += base;
        --qhat;
        std::uint64_t c2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
          std::uint64_t s = static_cast<std::uint64_t>(u.limbs_[i + j]) + v.limbs_[i] + c2;
          u.limbs_[i + j] = static_cast<std::uint32_t>(s);
          c2 = s >> 32;
        }
        t += static_cast<std::int64_t>(c2);
      }
      u.limbs_[j + n] = static_cast<std::uint32_t>(t);
      q.limbs_[j] = static_cast<std::uint32_t>(qhat);
    }
    q.trim();
    u.limbs_.resize(n);
    u.trim();
    u.neg_ = false;
    r = u >> shift;
  }
};

inline BigInt operator*(std::int64_t a, const BigInt& b) { return BigInt(a) * b; }

}  // namespace qmf
