#pragma once

// Exact Toom-Cook evaluation/interpolation algebra over extended-rational
// evaluation points (finite integers, unit fractions, and the point at
// infinity). Matrices absorb the unit-fraction scaling so every entry stays
// an integer; interpolation weights are exact rationals. This module is the
// classical oracle for every phase decomposition in the compiler.

#include <stdexcept>
#include <string>
#include <vector>

#include "qmf/bigint.hpp"
#include "qmf/rational.hpp"

namespace qmf {

struct SingularMatrixError : std::runtime_error {
  SingularMatrixError() : std::runtime_error("singular matrix (duplicate evaluation points?)") {}
};

enum class ToomMode { Double, Triple };

// An evaluation point: either a finite integer w, or a unit fraction 1/c
// where c = 0 denotes the point at infinity.
struct EvalPoint {
  enum class Kind { Finite, UnitFraction };
  Kind kind = Kind::Finite;
  std::int64_t value = 0;  // w for finite, c for unit fractions

  static EvalPoint finite(std::int64_t w) { return {Kind::Finite, w}; }
  static EvalPoint unit_fraction(std::int64_t c) { return {Kind::UnitFraction, c}; }
  static EvalPoint infinity() { return {Kind::UnitFraction, 0}; }

  bool is_infinity() const { return kind == Kind::UnitFraction && value == 0; }

  // Extended-rational identity (num, den), normalized with den >= 0.
  std::pair<std::int64_t, std::int64_t> as_extended_rational() const {
    if (kind == Kind::Finite) return {value, 1};
    if (value < 0) return {-1, -value};
    return {1, value};  // infinity maps to (1, 0)
  }

  friend bool operator==(const EvalPoint& a, const EvalPoint& b) {
    return a.as_extended_rational() == b.as_extended_rational();
  }

  std::string to_string() const {
    if (kind == Kind::Finite) return std::to_string(value);
    if (value == 0) return "inf";
    return (value < 0 ? "-1/" + std::to_string(-value) : "1/" + std::to_string(value));
  }
};

enum class PointPolicy {
  Standard,          // 0, inf, -1, 1, -1/2, 1/2, -2, 2, -1/4, 1/4, -4, 4, ...
  UnitFractionOnly,  // 0, inf, -1, 1, -1/2, 1/2, -1/4, 1/4, ... (in-place builds)
};

// Policy order for the first q evaluation points. 0 and inf are always
// first (both readable straight off the inputs); -1 is preferred over 1;
// beyond that, unit fractions with power-of-two denominators come before
// the matching integer points, negatives first.
inline std::vector<EvalPoint> select_eval_points(std::size_t q, ToomMode /*mode*/,
                                                 PointPolicy policy = PointPolicy::Standard) {
  if (q < 1) throw std::invalid_argument("select_eval_points: q must be >= 1");
  std::vector<EvalPoint> pts;
  pts.reserve(q);
  pts.push_back(EvalPoint::finite(0));
  if (pts.size() < q) pts.push_back(EvalPoint::infinity());
  if (pts.size() < q) pts.push_back(EvalPoint::finite(-1));
  if (pts.size() < q) pts.push_back(EvalPoint::finite(1));
  std::int64_t omega = 2;
  while (pts.size() < q) {
    pts.push_back(EvalPoint::unit_fraction(-omega));
    if (pts.size() < q) pts.push_back(EvalPoint::unit_fraction(omega));
    if (policy == PointPolicy::Standard) {
      if (pts.size() < q) pts.push_back(EvalPoint::finite(-omega));
      if (pts.size() < q) pts.push_back(EvalPoint::finite(omega));
    }
    omega *= 2;
  }
  return pts;
}

using IntMatrix = std::vector<std::vector<BigInt>>;
using RatMatrix = std::vector<std::vector<Rational>>;

// Row for a finite point w is (w^{width-1}, ..., w, 1); for a unit fraction
// 1/c it is the scaled form (1, c, ..., c^{width-1}). Columns therefore
// multiply digits most-significant first.
inline IntMatrix eval_matrix(const std::vector<EvalPoint>& points, std::size_t width) {
  IntMatrix m(points.size());
  for (std::size_t l = 0; l < points.size(); ++l) {
    m[l].resize(width);
    const EvalPoint& p = points[l];
    for (std::size_t j = 0; j < width; ++j) {
      unsigned e = static_cast<unsigned>(p.kind == EvalPoint::Kind::Finite ? width - 1 - j : j);
      m[l][j] = BigInt(p.value).pow(e);
    }
  }
  return m;
}

// Exact Gauss-Jordan inverse. Throws SingularMatrixError.
inline RatMatrix invert_exact(RatMatrix m) {
  std::size_t n = m.size();
  for (auto& row : m)
    if (row.size() != n) throw std::invalid_argument("invert_exact: matrix not square");
  RatMatrix inv(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col].is_zero()) ++pivot;
    if (pivot == n) throw SingularMatrixError();
    std::swap(m[pivot], m[col]);
    std::swap(inv[pivot], inv[col]);
    Rational d = m[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      m[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || m[i][col].is_zero()) continue;
      Rational f = m[i][col];
      for (std::size_t j = 0; j < n; ++j) {
        m[i][j] -= f * m[col][j];
        inv[i][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

inline RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix r(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    r[i].reserve(m[i].size());
    for (const auto& v : m[i]) r[i].emplace_back(v);
  }
  return r;
}

// A fully resolved split: evaluation points, the integer evaluation
// matrices, the exact inverse of A'', and the piece bit-widths. The low
// k-1 pieces get floor(n/k) bits and the top piece carries the remainder.
struct ToomPlan {
  ToomMode mode = ToomMode::Double;
  std::size_t n = 0;  // total input bit-width
  std::size_t k = 0;  // split count
  std::size_t q = 0;  // point count: 2k-1 (double) or 3k-2 (triple)
  std::vector<EvalPoint> points;
  IntMatrix a_prime;          // q x k
  RatMatrix a_doubleprime_inv;  // q x q, exact inverse of A''
  std::vector<std::size_t> piece_widths;  // low-first, length k

  std::size_t base_width() const { return n / k; }  // uniform width of the low pieces
  std::size_t top_width() const { return piece_widths.back(); }

  // (A' x)_l for low-first piece values.
  BigInt evaluate(std::size_t l, const std::vector<BigInt>& pieces_low_first) const {
    BigInt acc;
    for (std::size_t j = 0; j < k; ++j)
      acc += a_prime[l][j] * pieces_low_first[k - 1 - j];
    return acc;
  }

  // Integer coefficient of piece i (low-first index) in (A' x)_l.
  const BigInt& piece_coefficient(std::size_t l, std::size_t i) const {
    return a_prime[l][k - 1 - i];
  }
};

inline std::size_t point_count(ToomMode mode, std::size_t k) {
  return mode == ToomMode::Double ? 2 * k - 1 : 3 * k - 2;
}

inline std::vector<std::size_t> piece_widths_for(std::size_t n, std::size_t k) {
  std::vector<std::size_t> w(k, n / k);
  w.back() = n - (k - 1) * (n / k);
  return w;
}

inline void check_points_distinct(const std::vector<EvalPoint>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (pts[i] == pts[j]) throw std::invalid_argument("evaluation points not distinct");
}

inline ToomPlan make_plan_with_points(std::size_t n, std::size_t k, ToomMode mode,
                                      std::vector<EvalPoint> points) {
  if (k < 2) throw std::invalid_argument("make_plan: k must be >= 2");
  if (n < k) throw std::invalid_argument("make_plan: need n >= k");
  std::size_t q = point_count(mode, k);
  if (points.size() != q) throw std::invalid_argument("make_plan: wrong point count");
  check_points_distinct(points);
  ToomPlan plan;
  plan.mode = mode;
  plan.n = n;
  plan.k = k;
  plan.q = q;
  plan.points = std::move(points);
  plan.a_prime = eval_matrix(plan.points, k);
  plan.a_doubleprime_inv = invert_exact(to_rational(eval_matrix(plan.points, q)));
  plan.piece_widths = piece_widths_for(n, k);
  return plan;
}

inline ToomPlan make_plan(std::size_t n, std::size_t k, ToomMode mode,
                          PointPolicy policy = PointPolicy::Standard) {
  return make_plan_with_points(n, k, mode, select_eval_points(point_count(mode, k), mode, policy));
}

// Interpolation weights phi_l = phi * e_b^T (A'')^{-1}, with b = 2^{floor(n/k)}.
// Also kept over a common denominator so hot paths can run all-integer.
struct PhiVector {
  std::vector<Rational> entries;
  Rational base_angle;
  // entries[l] == common_numerators[l] / common_denominator (before base_angle)
  std::vector<BigInt> common_numerators;
  BigInt common_denominator;
};

inline PhiVector phi_coefficients(const ToomPlan& plan, const Rational& phi = Rational(1)) {
  std::size_t q = plan.q;
  BigInt b = BigInt::pow2(plan.base_width());
  // e_b, most-significant first: (b^{q-1}, ..., b, 1).
  std::vector<BigInt> e(q);
  for (std::size_t j = 0; j < q; ++j) e[j] = b.pow(static_cast<unsigned>(q - 1 - j));
  PhiVector out;
  out.base_angle = phi;
  out.entries.resize(q);
  for (std::size_t l = 0; l < q; ++l) {
    Rational acc;
    for (std::size_t j = 0; j < q; ++j) acc += Rational(e[j]) * plan.a_doubleprime_inv[j][l];
    out.entries[l] = acc * phi;
  }
  // Common-denominator form of the raw weights e^T (A'')^{-1}.
  BigInt den(1);
  for (std::size_t l = 0; l < q; ++l) {
    Rational w = out.entries[l];
    if (!phi.is_zero()) w /= phi;
    BigInt g = BigInt::gcd(den, w.den());
    den = den / g * w.den();
  }
  out.common_denominator = den;
  out.common_numerators.resize(q);
  for (std::size_t l = 0; l < q; ++l) {
    Rational w = out.entries[l];
    if (!phi.is_zero()) w /= phi;
    out.common_numerators[l] = w.num() * (den / w.den());
  }
  return out;
}

// Low-first base-2^width digit split per the plan's piece widths.
inline std::vector<BigInt> split_pieces(const BigInt& x, const ToomPlan& plan) {
  std::vector<BigInt> pieces(plan.k);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < plan.k; ++i) {
    std::size_t w = plan.piece_widths[i];
    BigInt part = x >> offset;
    if (i + 1 < plan.k) part = part.low_bits(w);
    pieces[i] = part;
    offset += w;
  }
  return pieces;
}

namespace detail {
inline std::vector<BigInt> pointwise_products(const ToomPlan& plan,
                                              const std::vector<std::vector<BigInt>>& piece_sets) {
  std::vector<BigInt> t(plan.q);
  for (std::size_t l = 0; l < plan.q; ++l) {
    BigInt prod(1);
    for (const auto& pieces : piece_sets) prod *= plan.evaluate(l, pieces);
    t[l] = prod;
  }
  return t;
}

// e_b^T (A'')^{-1} t, computed all-integer over the phi common denominator.
inline Rational interpolate(const ToomPlan& plan, const PhiVector& phi_raw,
                            const std::vector<BigInt>& t) {
  BigInt acc;
  for (std::size_t l = 0; l < plan.q; ++l) acc += phi_raw.common_numerators[l] * t[l];
  return Rational(acc, phi_raw.common_denominator);
}
}  // namespace detail

// Exact product via evaluate / pointwise-multiply / interpolate.
inline BigInt toom_multiply_oracle(const BigInt& x, const BigInt& y, const ToomPlan& plan) {
  PhiVector raw = phi_coefficients(plan);
  auto t = detail::pointwise_products(plan, {split_pieces(x, plan), split_pieces(y, plan)});
  Rational r = detail::interpolate(plan, raw, t);
  if (!r.is_integer()) throw std::logic_error("toom_multiply_oracle: non-integer result");
  return r.num();
}

inline BigInt toom_triple_oracle(const BigInt& x, const BigInt& y, const BigInt& z,
                                 const ToomPlan& plan) {
  if (plan.mode != ToomMode::Triple)
    throw std::invalid_argument("toom_triple_oracle: plan mode must be triple");
  PhiVector raw = phi_coefficients(plan);
  auto t = detail::pointwise_products(
      plan, {split_pieces(x, plan), split_pieces(y, plan), split_pieces(z, plan)});
  Rational r = detail::interpolate(plan, raw, t);
  if (!r.is_integer()) throw std::logic_error("toom_triple_oracle: non-integer result");
  return r.num();
}

// Right-hand side of the phase decomposition: sum_l phi_l * prod_i (A' v_i)_l.
// Exact; equals phi * (product of inputs) by the Toom identity. The overload
// taking a precomputed PhiVector is for hot loops over one plan.
inline Rational phase_sum_identity(const ToomPlan& plan, const PhiVector& raw,
                                   const Rational& phi, const std::vector<BigInt>& inputs) {
  std::size_t expect = plan.mode == ToomMode::Double ? 2 : 3;
  if (inputs.size() != expect) throw std::invalid_argument("phase_sum_identity: wrong arity");
  std::vector<std::vector<BigInt>> piece_sets;
  piece_sets.reserve(inputs.size());
  for (const auto& v : inputs) piece_sets.push_back(split_pieces(v, plan));
  auto t = detail::pointwise_products(plan, piece_sets);
  return detail::interpolate(plan, raw, t) * phi;
}

inline Rational phase_sum_identity(const ToomPlan& plan, const Rational& phi,
                                   const std::vector<BigInt>& inputs) {
  return phase_sum_identity(plan, phi_coefficients(plan), phi, inputs);
}

}  // namespace qmf
