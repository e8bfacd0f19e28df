#pragma once

// Structured evaluator for the in-place modular multiplication circuit.
//
// The circuit is a fixed sequence of QFT sandwiches, diagonal phase
// products, and exact constant adders. This evaluator applies the same
// unitaries block by block: DFTs via an FFT kernel instead of rotation
// cascades, and each PhaseProduct via its defining phase exp(i phi x z).
// Block-for-block equivalence with the gate-level circuit is covered by
// tests (QFT circuit vs DFT matrix; compiled PhaseProduct vs phase
// formula; end-to-end against the dense simulator at small moduli). It
// exists because the interesting moduli need a few more qubits than dense
// gate-by-gate simulation can handle in reasonable time.
//
// The fraction register couples to the rest only through diagonal phases,
// so each branch |wt> evolves independently through steps 2-4 and the
// final fidelity is a single projected matrix element: the run streams
// one branch at a time and closes the last QFT sandwich analytically.

#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qmf/multiplier.hpp"

namespace qmf {

class ModMulEvaluator {
public:
  using cfloat = std::complex<float>;
  using cdbl = std::complex<double>;

  ModMulEvaluator(BigInt c, BigInt N, double eta)
      : c_(std::move(c)), N_(std::move(N)), eta_(eta) {
    if (!(BigInt::gcd(c_, N_) == BigInt(1)))
      throw std::invalid_argument("ModMulEvaluator: gcd(c, N) != 1");
    n_ = N_.bit_length();
    m_ = modmul_fraction_bits(n_, eta_);
    const BigInt c1 = BigInt::mod_floor(c_ - BigInt(1), N_);
    const BigInt cinv = BigInt::mod_inverse(c_, N_);
    const BigInt c2 = BigInt::mod_floor(BigInt(1) - cinv, N_);
    theta1_ = 2.0 * std::numbers::pi * Rational(c1, N_).to_double();
    theta5_ = 2.0 * std::numbers::pi * Rational(c2, N_).to_double();
    theta2_ = 2.0 * std::numbers::pi *
              Rational(N_, BigInt::pow2(m_) * BigInt::pow2(n_ + 1)).to_double();
    Nmod_ = N_.to_u64();
  }

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t total_qubits() const { return n_ + 1 + m_ + 1; }

  // |<cx mod N| <0...0| U |x> |0...0>|^2
  double fidelity(std::uint64_t x) const {
    const std::size_t M = std::size_t(1) << m_;
    const std::size_t D = std::size_t(1) << (n_ + 1);
    const std::uint64_t target =
        BigInt::mod_floor(c_ * BigInt(static_cast<std::int64_t>(x)), N_).to_u64();

    // Step 1 on the fraction register alone (x still a basis state):
    // alpha = IDFT(2^{-m/2} e^{i theta1 x z}).
    std::vector<cfloat> alpha(M);
    fill_geometric(alpha.data(), M, theta1_ * double(x));
    fft(alpha.data(), M, -1);
    for (auto& a : alpha) a *= 1.0f / float(M);

    // Steps 2-4 branch by branch; the final sandwich closes analytically:
    //   out = (1/M) sum_wt K(wt) psi4[wt][target],
    //   K(wt) = sum_z exp(i (2 pi wt / M - theta5 * target) z).
    std::vector<cfloat> b0(D), b1(D), tmp(D);
    cdbl out(0, 0);
    const double beta0 = -theta5_ * double(target);
    for (std::size_t wt = 0; wt < M; ++wt) {
      if (std::norm(alpha[wt]) == 0.0f) continue;
      const double t2 = theta2_ * double(wt);

      // Step 2: ext slice b=0 is IDFT(2^{-D/2} omega^{xz} e^{i t2 z}).
      fill_geometric(b0.data(), D, 2.0 * std::numbers::pi * double(x) / double(D) + t2);
      fft(b0.data(), D, -1);
      const cfloat f2 = alpha[wt] / float(D);
      for (auto& v : b0) v *= f2;
      std::fill(b1.begin(), b1.end(), cfloat(0, 0));

      // Step 3: subtract N, flip the compare bit off the top, add back.
      perm_add(b0, tmp, (D - Nmod_) & (D - 1));
      cnot_top(b0, b1);
      perm_add(b1, tmp, Nmod_ & (D - 1));

      // Step 4: X on the compare bit; subtract N wt / 2^m; flip off the
      // sign; add it back (only the b=0 slice can reach the target).
      b0.swap(b1);
      sandwich(b0.data(), D, -t2);
      sandwich(b1.data(), D, -t2);
      cnot_top(b0, b1);
      // Final Draper add, Fourier side only, projected onto |target>.
      fft(b0.data(), D, +1);
      cdbl psi4(0, 0);
      cdbl w(1, 0);
      const cdbl step =
          std::polar(1.0, t2 - 2.0 * std::numbers::pi * double(target) / double(D));
      for (std::size_t z = 0; z < D; ++z) {
        psi4 += cdbl(b0[z]) * w;
        w *= step;
      }
      psi4 /= double(D);

      out += psi4 * dirichlet(beta0 + 2.0 * std::numbers::pi * double(wt) / double(M), M);
    }
    out /= double(M);
    return std::norm(out);
  }

private:
  BigInt c_, N_;
  double eta_;
  std::size_t n_ = 0, m_ = 0;
  double theta1_ = 0, theta2_ = 0, theta5_ = 0;
  std::uint64_t Nmod_ = 0;

  static cfloat unitf(double angle) {
    return cfloat(float(std::cos(angle)), float(std::sin(angle)));
  }

  // buf[z] = e^{i step z}, recurrence refreshed to full precision regularly.
  static void fill_geometric(cfloat* buf, std::size_t count, double step) {
    cdbl w(1, 0);
    const cdbl s = std::polar(1.0, step);
    for (std::size_t z = 0; z < count; ++z) {
      if ((z & 255u) == 0u) w = std::polar(1.0, step * double(z));
      buf[z] = cfloat(float(w.real()), float(w.imag()));
      w *= s;
    }
  }

  // sum_{z < count} e^{i beta z}
  static cdbl dirichlet(double beta, std::size_t count) {
    double r = std::remainder(beta, 2.0 * std::numbers::pi);
    if (std::abs(r) < 1e-12) return cdbl(double(count), 0);
    cdbl num = std::polar(1.0, r * double(count)) - cdbl(1, 0);
    cdbl den = std::polar(1.0, r) - cdbl(1, 0);
    return num / den;
  }

  // Twiddles for a half-length, computed in double precision and cached.
  static const cfloat* twiddles(std::size_t half) {
    static thread_local std::vector<std::vector<cfloat>> cache;
    std::size_t lg = 0;
    while ((std::size_t(1) << lg) < half) ++lg;
    if (cache.size() <= lg) cache.resize(lg + 1);
    auto& tw = cache[lg];
    if (tw.empty()) {
      tw.resize(half == 0 ? 1 : half);
      for (std::size_t j = 0; j < tw.size(); ++j)
        tw[j] = unitf(2.0 * std::numbers::pi * double(j) / double(2 * tw.size()));
    }
    return tw.data();
  }

  // Unnormalized in-place radix-2 FFT, exponent sign `dir`.
  static void fft(cfloat* data, std::size_t n, int dir) {
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const cfloat* tw = twiddles(len / 2);
      for (std::size_t i = 0; i < n; i += len) {
        for (std::size_t j = 0; j < len / 2; ++j) {
          cfloat w = dir > 0 ? tw[j] : std::conj(tw[j]);
          cfloat u = data[i + j];
          cfloat v = data[i + j + len / 2] * w;
          data[i + j] = u + v;
          data[i + j + len / 2] = u - v;
        }
      }
    }
  }

  // slice[e] -> slice[e + delta mod D]
  static void perm_add(std::vector<cfloat>& slice, std::vector<cfloat>& tmp,
                       std::uint64_t delta) {
    if (delta == 0) return;
    const std::size_t D = slice.size();
    for (std::size_t e = 0; e < D; ++e) tmp[(e + delta) & (D - 1)] = slice[e];
    slice.swap(tmp);
  }

  // b ^= top bit of ext: swap the upper-half entries of the two slices.
  static void cnot_top(std::vector<cfloat>& b0, std::vector<cfloat>& b1) {
    const std::size_t D = b0.size();
    for (std::size_t e = D / 2; e < D; ++e) std::swap(b0[e], b1[e]);
  }

  // IQFT . diag(e^{i theta z}) . QFT: the Draper addition of theta D / 2pi.
  static void sandwich(cfloat* s, std::size_t D, double theta) {
    fft(s, D, +1);
    cdbl w(1, 0);
    const cdbl step = std::polar(1.0, theta);
    for (std::size_t z = 0; z < D; ++z) {
      if ((z & 255u) == 0u) w = std::polar(1.0, theta * double(z));
      s[z] *= cfloat(float(w.real()), float(w.imag()));
      w *= step;
    }
    fft(s, D, -1);
    const float inv = 1.0f / float(D);
    for (std::size_t z = 0; z < D; ++z) s[z] *= inv;
  }
};

}  // namespace qmf
