#pragma once

// Resource estimation: memoized exhaustive k-search over the recursion
// tree (shared with the compiler, so reports and compiled circuits agree
// by construction), per-gate-class tallies, and scaling-exponent fits.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "qmf/phase_compiler.hpp"
#include "qmf/qft.hpp"

namespace qmf {

struct CostReport {
  GateCensus counts;
  int ancillas = 0;
  std::size_t total_qubits = 0;
  // chosen k per (arity, width); 0 marks the base case
  std::map<std::pair<int, std::size_t>, std::size_t> k_tree;

  std::uint64_t rotations() const { return counts.crphi + counts.ccrphi; }
};

struct EstimatorConfig {
  CompileConfig compile;
  QftConfig qft;
  double eta = 1e-12;  // output-register precision for the modular multiplier

  std::size_t pad_bits() const {
    return static_cast<std::size_t>(std::ceil(std::log2(1.0 / eta)));
  }
};

class Estimator {
public:
  explicit Estimator(EstimatorConfig cfg = {}) : cfg_(cfg), compiler_(cfg.compile) {
    cfg_.qft.compile = cfg_.compile;
    if (cfg_.compile.angle_mode == AngleMode::PhaseGradient)
      cfg_.qft.variant = QftConfig::Variant::PhaseGradient;
  }

  const EstimatorConfig& config() const { return cfg_; }
  PhaseCompiler& compiler() { return compiler_; }

  CostReport estimate_phase_product(std::size_t n) {
    auto nc = compiler_.count_phase_product(n, n);
    return report_from(nc, 2 * n);
  }
  CostReport estimate_phase_triple(std::size_t n) {
    auto nc = compiler_.count_phase_triple(n, n, n);
    return report_from(nc, 3 * n);
  }

  // One modular classical-quantum multiplication: the QFT pair around the
  // phase product, output register n + pad qubits.
  CostReport estimate_multiplier(std::size_t n) {
    std::size_t n_w = n + cfg_.pad_bits();
    CountingSink cs;
    QftBuilder qb(cfg_.qft, compiler_);
    std::vector<int> w(n_w);
    for (std::size_t i = 0; i < n_w; ++i) w[i] = static_cast<int>(i);
    qb.emit_qft(cs, w);
    qb.emit_iqft(cs, w);
    auto pp = compiler_.count_phase_product(n, n_w);
    cs.absorb(pp.census, pp.ancilla_high);
    CostReport r = report_from({cs.census(), cs.ancilla_high_water()}, n + n_w);
    return r;
  }

  // Least-squares slope of log(rotation count) against log(n).
  double fit_scaling_exponent(const std::vector<std::size_t>& sizes,
                              ToomMode mode = ToomMode::Double) {
    if (sizes.size() < 4) throw std::invalid_argument("fit: need at least 4 sizes");
    double lo = double(sizes.front()), hi = double(sizes.front());
    for (auto s : sizes) {
      lo = std::min(lo, double(s));
      hi = std::max(hi, double(s));
    }
    if (hi < 4.0 * lo) throw std::invalid_argument("fit: sizes must span two octaves");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto n : sizes) {
      CostReport r = mode == ToomMode::Double ? estimate_phase_product(n)
                                              : estimate_phase_triple(n);
      double X = std::log(double(n));
      double Y = std::log(double(r.rotations()));
      sx += X;
      sy += Y;
      sxx += X * X;
      sxy += X * Y;
    }
    double m = double(sizes.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }

  // log_k(2k-1) and log_k(3k-2): the double and triple gate exponents.
  static std::pair<double, double> exponents_for_k(std::size_t k) {
    double lk = std::log(double(k));
    return {std::log(double(2 * k - 1)) / lk, std::log(double(3 * k - 2)) / lk};
  }
  static std::map<std::size_t, std::pair<double, double>> exponent_table(std::size_t kmax = 9) {
    std::map<std::size_t, std::pair<double, double>> t;
    for (std::size_t k = 2; k <= kmax; ++k) t[k] = exponents_for_k(k);
    return t;
  }

  void clear_memo() { compiler_.clear_memo(); }
  std::uint64_t search_nodes() const { return compiler_.search_nodes(); }

private:
  EstimatorConfig cfg_;
  PhaseCompiler compiler_;

  CostReport report_from(const PhaseCompiler::NodeCost& nc, std::size_t io_qubits) {
    CostReport r;
    r.counts = nc.census;
    r.ancillas = nc.ancilla_high;
    r.total_qubits = io_qubits + static_cast<std::size_t>(nc.ancilla_high);
    r.k_tree = compiler_.decision_summary();
    return r;
  }
};

}  // namespace qmf
