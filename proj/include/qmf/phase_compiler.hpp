#pragma once

// Recursive lowering of PhaseProduct / PhaseTripleProduct into gates.
//
// exp(i*phi*x*z) is decomposed per plan into sum_l phi_l (A'x)_l (A'z)_l.
// The linear combinations are formed in place over the most significant
// piece. Two overflow disciplines:
//
//  - zero_ancilla: each addition runs inside the target's fixed window.
//    Out-of-window value (adder carries caught mid-Cuccaro, addend bits
//    that stick past the window, and the borrowed dirty carry-in) is
//    accounted exactly by extra controlled rotations. With C = R + D per
//    side, phi*C_a*C_b = phi*(R_a*R_b + D_a*C_b + D_b*R_a): defect bits of
//    the side built first rotate against the other side's untouched
//    pieces, later ones against the finished window.
//
//  - stored_ancilla: written pieces get clean extension qubits sized from
//    the symbolic value bounds, additions are exact two's complement, and
//    each recursion fixes the sign bit with a few rotations.
//
// Angles ride through compilation as (double base) * (exact Rational) and
// become plain doubles only at gate emission.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "qmf/adders.hpp"
#include "qmf/circuit.hpp"
#include "qmf/rational.hpp"
#include "qmf/schedule.hpp"
#include "qmf/toom.hpp"

namespace qmf {

struct PhaseAngle {
  double base = 0.0;      // radians
  Rational scale{1};      // exact factor accumulated through the recursion

  PhaseAngle scaled(const Rational& r) const { return {base, scale * r}; }
  double radians() const { return base * scale.to_double(); }
  bool structurally_zero() const { return base == 0.0; }
};

enum class OverflowMode { ZeroAncilla, StoredAncilla };
enum class BaseMode { Schoolbook, SemiDigital };
enum class AngleMode { ExactRotation, PhaseGradient };

struct KPolicy {
  enum class Mode { Auto, Fixed, SchoolbookOnly };
  Mode mode = Mode::Auto;
  std::size_t k = 2;

  static KPolicy auto_search() { return {Mode::Auto, 2}; }
  static KPolicy fixed(std::size_t k) { return {Mode::Fixed, k}; }
  static KPolicy schoolbook_only() { return {Mode::SchoolbookOnly, 2}; }
};

struct CostWeights {
  double crphi = 1.0;
  double ccrphi = 1.0;
  double toffoli = 0.0;
  double clifford = 0.0;
  double rphi = 0.0;

  double of(const GateCensus& c) const {
    return crphi * double(c.crphi) + ccrphi * double(c.ccrphi) + toffoli * double(c.toffoli) +
           clifford * double(c.clifford) + rphi * double(c.rphi);
  }
};

struct CompileConfig {
  KPolicy k_policy = KPolicy::auto_search();
  std::size_t n_base_double = 8;
  std::size_t n_base_triple = 4;
  OverflowMode overflow_mode = OverflowMode::StoredAncilla;
  BaseMode base_mode = BaseMode::Schoolbook;
  AngleMode angle_mode = AngleMode::ExactRotation;
  std::size_t phase_gradient_bits = 30;
  std::size_t max_k = 12;
  // Stored mode: pairs whose coefficient sum outgrows this many bits are
  // built as independent points (a few more additions, far less parked
  // overflow during the recursive calls).
  std::size_t pair_coeff_limit_bits = 7;
  CostWeights cost;

  std::size_t n_base(ToomMode mode) const {
    return mode == ToomMode::Double ? n_base_double : n_base_triple;
  }
  PointPolicy point_policy() const {
    return overflow_mode == OverflowMode::ZeroAncilla ? PointPolicy::UnitFractionOnly
                                                      : PointPolicy::Standard;
  }
};

// A register slice with a classical coefficient: value = coef * bits.
struct WeightedTerm {
  std::vector<int> bits;  // little-endian qubit list
  Rational coef{1};
};
using SideSpec = std::vector<WeightedTerm>;

inline SideSpec single_span(std::vector<int> bits) {
  SideSpec s;
  s.push_back({std::move(bits), Rational(1)});
  return s;
}

// --- base cases ------------------------------------------------------------

// width_x * width_z singly controlled rotations (doubly with ctrl), angle
// of gate (i, j) = phi * 2^{i+j}.
inline void emit_base_schoolbook(GateSink& sink, const std::vector<int>& x,
                                 const std::vector<int>& z, const PhaseAngle& phi,
                                 int ctrl = -1, bool counting = false) {
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < z.size(); ++j) {
      double a = counting ? 0.0 : phi.scaled(Rational(BigInt::pow2(i + j))).radians();
      emit_phase_on_bits(sink, ctrl, x[i], z[j], a);
    }
}

// Triple schoolbook: doubly controlled rotations with angle phi * 2^{i+j+l}.
inline void emit_base_schoolbook_triple(GateSink& sink, const std::vector<int>& x,
                                        const std::vector<int>& y, const std::vector<int>& z,
                                        const PhaseAngle& phi, bool counting = false) {
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      for (std::size_t l = 0; l < z.size(); ++l) {
        double a = counting ? 0.0 : phi.scaled(Rational(BigInt::pow2(i + j + l))).radians();
        emit_ccrphi(sink, x[i], y[j], z[l], a);
      }
}

// --- the compiler ----------------------------------------------------------

class PhaseCompiler {
public:
  struct NodeCost {
    GateCensus census;
    int ancilla_high = 0;
  };

  explicit PhaseCompiler(CompileConfig cfg = {}) : cfg_(cfg) {}

  const CompileConfig& config() const { return cfg_; }

  // Spec entry points. Registers are little-endian, x first.
  Circuit compile_phase_product(std::size_t width_x, std::size_t width_z, double phi) {
    if (width_x < 1 || width_z < 1)
      throw std::invalid_argument("compile_phase_product: width below 1");
    Circuit c;
    auto rx = c.add_register("x", static_cast<int>(width_x), "input").qubits();
    auto rz = c.add_register("z", static_cast<int>(width_z), "input").qubits();
    if (phi != 0.0) {
      Ctx ctx{&c, false};
      phase_product(ctx, single_span(rx), single_span(rz), PhaseAngle{phi, Rational(1)}, -1);
    }
    return c;
  }

  Circuit compile_phase_triple(std::size_t wx, std::size_t wy, std::size_t wz, double phi) {
    if (wx < 1 || wy < 1 || wz < 1)
      throw std::invalid_argument("compile_phase_triple: width below 1");
    Circuit c;
    auto rx = c.add_register("x", static_cast<int>(wx), "input").qubits();
    auto ry = c.add_register("y", static_cast<int>(wy), "input").qubits();
    auto rz = c.add_register("z", static_cast<int>(wz), "input").qubits();
    if (phi != 0.0) {
      Ctx ctx{&c, false};
      phase_triple(ctx, single_span(rx), single_span(ry), single_span(rz),
                   PhaseAngle{phi, Rational(1)});
    }
    return c;
  }

  // Emission into an existing circuit (used by the multiplier builders).
  void emit_phase_product(GateSink& sink, const std::vector<int>& x, const std::vector<int>& z,
                          const PhaseAngle& phi) {
    if (phi.structurally_zero()) return;
    Ctx ctx{&sink, false};
    phase_product(ctx, single_span(x), single_span(z), phi, -1);
  }
  void emit_phase_triple(GateSink& sink, const std::vector<int>& x, const std::vector<int>& y,
                         const std::vector<int>& z, const PhaseAngle& phi) {
    if (phi.structurally_zero()) return;
    Ctx ctx{&sink, false};
    phase_triple(ctx, single_span(x), single_span(y), single_span(z), phi);
  }
  void emit_phase_product_general(GateSink& sink, const SideSpec& a, const SideSpec& b,
                                  const PhaseAngle& phi, int ctrl = -1) {
    if (phi.structurally_zero()) return;
    Ctx ctx{&sink, false};
    phase_product(ctx, a, b, phi, ctrl);
  }
  void emit_phase_triple_general(GateSink& sink, const SideSpec& x, const SideSpec& y,
                                 const SideSpec& z, const PhaseAngle& phi) {
    if (phi.structurally_zero()) return;
    Ctx ctx{&sink, false};
    phase_triple(ctx, x, y, z, phi);
  }

  // Memoized census of the circuit compile_phase_product would emit.
  NodeCost count_phase_product(std::size_t wx, std::size_t wz) {
    return count_node(Key{2, 0, {wx, wz, 0}});
  }
  NodeCost count_phase_triple(std::size_t wx, std::size_t wy, std::size_t wz) {
    return count_node(Key{3, 0, {wx, wy, wz}});
  }

  // The decision table, for k-tree summaries: (arity, width) -> k (0 = base).
  std::map<std::pair<int, std::size_t>, std::size_t> decision_summary() {
    std::lock_guard<std::mutex> lk(mu_);
    std::map<std::pair<int, std::size_t>, std::size_t> out;
    for (const auto& [key, ch] : decisions_) {
      if (key.w[0] != key.w[1] || key.ctrl) continue;
      out[{key.arity, key.w[0]}] = ch.kind == Choice::Kind::Recurse ? ch.k : 0;
    }
    return out;
  }

  void clear_memo() {
    std::lock_guard<std::mutex> lk(mu_);
    decisions_.clear();
    costs_.clear();
    search_nodes_ = 0;
  }
  std::uint64_t search_nodes() const { return search_nodes_; }

  const ToomPlan& plan_for(std::size_t n, std::size_t k, ToomMode mode) {
    return plan_data(n, k, mode).plan;
  }

private:
  struct PlanData {
    ToomPlan plan;
    PhiVector phi;
    AdderSchedule schedule;            // stored mode only
    std::size_t ext_width = 0;         // width of the recursion target piece
    std::size_t pad_need = 0;          // zero-padding qubits for short addends
    std::vector<std::size_t> piece_ext;  // per piece: extended width (0 = raw)
    std::vector<bool> product_signed;  // per product: value can be negative
    // pieces whose extension must exist before step i / can go after step i
    std::vector<std::vector<std::size_t>> ext_alloc_before;
    std::vector<std::vector<std::size_t>> ext_release_after;
  };

  struct Key {
    std::uint8_t arity = 2;  // 2 = product, 3 = triple product
    std::uint8_t ctrl = 0;   // rotations carry one extra control
    std::array<std::size_t, 3> w{};

    bool operator==(const Key& o) const { return arity == o.arity && ctrl == o.ctrl && w == o.w; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = k.arity * 2 + k.ctrl;
      for (auto v : k.w) h = h * 1000003ull + v;
      return h;
    }
  };
  struct Choice {
    enum class Kind { Base, Recurse, Chunk };
    Kind kind = Kind::Base;
    std::size_t k = 0;
    bool operator==(const Choice& o) const { return kind == o.kind && k == o.k; }
  };
  struct ChoiceKey {
    Key key;
    Choice choice;
    bool operator==(const ChoiceKey& o) const { return key == o.key && choice == o.choice; }
  };
  struct ChoiceKeyHash {
    std::size_t operator()(const ChoiceKey& ck) const {
      return KeyHash{}(ck.key) * 31 + static_cast<std::size_t>(ck.choice.kind) * 7 + ck.choice.k;
    }
  };

  struct Ctx {
    GateSink* sink = nullptr;
    bool counting = false;
  };

  CompileConfig cfg_;
  std::mutex mu_;
  std::unordered_map<Key, Choice, KeyHash> decisions_;
  std::unordered_map<ChoiceKey, NodeCost, ChoiceKeyHash> costs_;
  std::map<std::tuple<std::size_t, std::size_t, int>, std::shared_ptr<PlanData>> plans_;
  std::uint64_t search_nodes_ = 0;

  const PlanData& plan_data(std::size_t n, std::size_t k, ToomMode mode) {
    auto key = std::make_tuple(n, k, mode == ToomMode::Double ? 0 : 1);
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = plans_.find(key);
      if (it != plans_.end()) return *it->second;
    }
    auto pd = std::make_shared<PlanData>();
    pd->plan = make_plan(n, k, mode, cfg_.point_policy());
    pd->phi = phi_coefficients(pd->plan);
    if (cfg_.overflow_mode == OverflowMode::StoredAncilla) {
      pd->schedule = schedule_linear_combinations(pd->plan, cfg_.pair_coeff_limit_bits);
      analyze_schedule(*pd);
    }
    std::lock_guard<std::mutex> lk(mu_);
    auto [it, ok] = plans_.emplace(key, std::move(pd));
    (void)ok;
    return *it->second;
  }

  // ---- decision / counting ----

  ToomMode mode_of(const Key& key) const {
    return key.arity == 2 ? ToomMode::Double : ToomMode::Triple;
  }

  bool widths_equal(const Key& key) const {
    if (key.arity == 2) return key.w[0] == key.w[1];
    return key.w[0] == key.w[1] && key.w[1] == key.w[2];
  }

  Choice decide(const Key& key) {
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = decisions_.find(key);
      if (it != decisions_.end()) return it->second;
    }
    Choice best;
    if (!widths_equal(key)) {
      best = {Choice::Kind::Chunk, 0};
    } else {
      std::size_t n = key.w[0];
      ToomMode mode = mode_of(key);
      std::vector<Choice> candidates;
      switch (cfg_.k_policy.mode) {
        case KPolicy::Mode::SchoolbookOnly:
          candidates.push_back({Choice::Kind::Base, 0});
          break;
        case KPolicy::Mode::Fixed:
          if (n > cfg_.n_base(mode) && cfg_.k_policy.k >= 2 && cfg_.k_policy.k <= n &&
              top_width_after(n, cfg_.k_policy.k, mode) < n)
            candidates.push_back({Choice::Kind::Recurse, cfg_.k_policy.k});
          else
            candidates.push_back({Choice::Kind::Base, 0});
          break;
        case KPolicy::Mode::Auto: {
          candidates.push_back({Choice::Kind::Base, 0});
          if (n > cfg_.n_base(mode)) {
            std::size_t kmax = std::min<std::size_t>(cfg_.max_k, n);
            for (std::size_t k = 2; k <= kmax; ++k)
              if (top_width_after(n, k, mode) < n) candidates.push_back({Choice::Kind::Recurse, k});
          }
          break;
        }
      }
      if (candidates.size() == 1) {
        best = candidates[0];
      } else {
        double best_cost = 0;
        bool first = true;
        for (const auto& cand : candidates) {
          ++search_nodes_;
          NodeCost nc = count_choice(key, cand);
          double cost = cfg_.cost.of(nc.census);
          // Candidates are ordered base-first then ascending k, so strict
          // comparison breaks ties toward the base case and smaller k.
          if (first || cost < best_cost) {
            best = cand;
            best_cost = cost;
            first = false;
          }
        }
      }
    }
    std::lock_guard<std::mutex> lk(mu_);
    decisions_.emplace(key, best);
    return decisions_.at(key);
  }

  std::size_t top_width_after(std::size_t n, std::size_t k, ToomMode mode) {
    if (k < 2 || k > n) return n;
    if (cfg_.overflow_mode == OverflowMode::ZeroAncilla) return piece_widths_for(n, k).back();
    return plan_data(n, k, mode).ext_width;
  }

  NodeCost count_node(const Key& key) { return count_choice(key, decide(key)); }

  // Census of one node with a given choice; children come from the memo.
  NodeCost count_choice(const Key& key, const Choice& choice) {
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = costs_.find({key, choice});
      if (it != costs_.end()) return it->second;
    }
    CountingSink cs;
    Ctx ctx{&cs, true};
    int fake_ctrl = -1;
    auto sides = fake_sides(key, fake_ctrl);
    emit_raw(ctx, key, choice, sides, PhaseAngle{1.0, Rational(1)}, fake_ctrl);
    NodeCost nc{cs.census(), cs.ancilla_high_water()};
    std::lock_guard<std::mutex> lk(mu_);
    costs_.emplace(ChoiceKey{key, choice}, nc);
    return nc;
  }

  // Counting runs on synthetic qubit indices; values never matter.
  std::vector<SideSpec> fake_sides(const Key& key, int& fake_ctrl) const {
    std::vector<SideSpec> sides;
    int next = 0;
    for (int s = 0; s < key.arity; ++s) {
      std::vector<int> bits(key.w[static_cast<std::size_t>(s)]);
      for (auto& b : bits) b = next++;
      sides.push_back(single_span(std::move(bits)));
    }
    fake_ctrl = key.ctrl ? next : -1;
    return sides;
  }

  // ---- emission ----

  static SideSpec pruned(const SideSpec& s) {
    SideSpec out;
    for (const auto& t : s)
      if (!t.bits.empty() && !t.coef.is_zero()) out.push_back(t);
    return out;
  }

  double angle_of(const Ctx& ctx, const PhaseAngle& phi, const Rational& extra) const {
    if (ctx.counting) return 0.0;
    return phi.scaled(extra).radians();
  }

  // Rescales the side so its in-place target carries coefficient +1 (or, for
  // single-term sides, folds the whole coefficient); adjusts phi accordingly.
  static void normalize_side(SideSpec& side, PhaseAngle& phi) {
    if (side.size() == 1) {
      phi = phi.scaled(side[0].coef);
      side[0].coef = Rational(1);
      return;
    }
    std::ptrdiff_t target = -1;
    for (std::size_t i = side.size(); i-- > 0;) {
      const Rational& c = side[i].coef;
      if (c == Rational(1) || c == Rational(-1)) {
        target = static_cast<std::ptrdiff_t>(i);
        break;
      }
    }
    if (target < 0) throw std::logic_error("build: no unit-coefficient target piece");
    if (side[static_cast<std::size_t>(target)].coef == Rational(-1)) {
      phi = phi.scaled(Rational(-1));
      for (auto& t : side) t.coef = -t.coef;
    }
    // Move the target to the back so builders can rely on its position.
    std::rotate(side.begin() + target, side.begin() + target + 1, side.end());
  }

  // phi * (side a value) * (side b value), one optional extra control.
  void phase_product(Ctx& ctx, SideSpec a, SideSpec b, PhaseAngle phi, int ctrl) {
    a = pruned(a);
    b = pruned(b);
    if (a.empty() || b.empty()) return;
    normalize_side(a, phi);
    normalize_side(b, phi);
    if (a.size() == 1 && b.size() == 1) {
      pp_core(ctx, a[0].bits, b[0].bits, phi, ctrl);
      return;
    }
    std::array<SideSpec*, 2> sides{&a, &b};
    std::array<BuiltSide, 2> built;
    for (std::size_t s = 0; s < 2; ++s) {
      SideSpec& cur = *sides[s];
      if (cur.size() == 1) {
        built[s].window = cur[0].bits;
        built[s].built = false;
        continue;
      }
      auto rotate = [&, s](int beta, const Rational& weight) {
        if (s == 0)
          rotate_vs_spec(ctx, ctrl, beta, b, phi.scaled(weight));
        else
          rotate_vs_window(ctx, ctrl, beta, built[0].window, phi.scaled(weight));
      };
      built[s] = build_side(ctx, cur, rotate);
    }
    if (built[0].signed_window || built[1].signed_window) {
      std::vector<std::vector<int>> windows{built[0].window, built[1].window};
      emit_sign_corrections(ctx, windows, {built[0].signed_window, built[1].signed_window},
                            phi, ctrl);
    }
    pp_core(ctx, built[0].window, built[1].window, phi, ctrl);
    for (std::size_t s = 2; s-- > 0;)
      if (built[s].built) unbuild_side(ctx, built[s]);
  }

  void phase_triple(Ctx& ctx, SideSpec x, SideSpec y, SideSpec z, PhaseAngle phi) {
    x = pruned(x);
    y = pruned(y);
    z = pruned(z);
    if (x.empty() || y.empty() || z.empty()) return;
    normalize_side(x, phi);
    normalize_side(y, phi);
    normalize_side(z, phi);
    if (x.size() == 1 && y.size() == 1 && z.size() == 1) {
      pt_core(ctx, x[0].bits, y[0].bits, z[0].bits, phi);
      return;
    }
    std::array<SideSpec*, 3> sides{&x, &y, &z};
    std::array<BuiltSide, 3> built;
    for (std::size_t s = 0; s < 3; ++s) {
      SideSpec& cur = *sides[s];
      if (cur.size() == 1) {
        built[s].window = cur[0].bits;
        built[s].built = false;
        continue;
      }
      // A defect bit is a single-bit factor of the triple product: lower it
      // as a PhaseProduct controlled off that bit.
      auto rotate = [&, s](int beta, const Rational& weight) {
        PhaseAngle w = phi.scaled(weight);
        if (s == 0)
          phase_product(ctx, y, z, w, beta);
        else if (s == 1)
          phase_product(ctx, single_span(built[0].window), z, w, beta);
        else
          phase_product(ctx, single_span(built[0].window), single_span(built[1].window), w,
                        beta);
      };
      built[s] = build_side(ctx, cur, rotate);
    }
    if (built[0].signed_window || built[1].signed_window || built[2].signed_window) {
      std::vector<std::vector<int>> windows{built[0].window, built[1].window, built[2].window};
      emit_sign_corrections(
          ctx, windows,
          {built[0].signed_window, built[1].signed_window, built[2].signed_window}, phi, -1);
    }
    pt_core(ctx, built[0].window, built[1].window, built[2].window, phi);
    for (std::size_t s = 3; s-- > 0;)
      if (built[s].built) unbuild_side(ctx, built[s]);
  }

  void rotate_vs_spec(Ctx& ctx, int ctrl, int beta, const SideSpec& spec,
                      const PhaseAngle& phi) {
    for (const auto& t : spec)
      for (std::size_t i = 0; i < t.bits.size(); ++i)
        emit_phase_on_bits(*ctx.sink, ctrl, beta, t.bits[i],
                           angle_of(ctx, phi, t.coef * Rational(BigInt::pow2(i))));
  }
  void rotate_vs_window(Ctx& ctx, int ctrl, int beta, const std::vector<int>& window,
                        const PhaseAngle& phi) {
    for (std::size_t i = 0; i < window.size(); ++i)
      emit_phase_on_bits(*ctx.sink, ctrl, beta, window[i],
                         angle_of(ctx, phi, Rational(BigInt::pow2(i))));
  }

  // ---- single-register recursion core ----

  void pp_core(Ctx& ctx, const std::vector<int>& a, const std::vector<int>& b, PhaseAngle phi,
               int ctrl) {
    if (a.empty() || b.empty()) return;
    Key key{2, static_cast<std::uint8_t>(ctrl >= 0 ? 1 : 0), {a.size(), b.size(), 0}};
    std::vector<SideSpec> sides{single_span(a), single_span(b)};
    emit_with_choice(ctx, key, decide(key), sides, phi, ctrl);
  }

  void pt_core(Ctx& ctx, const std::vector<int>& x, const std::vector<int>& y,
               const std::vector<int>& z, PhaseAngle phi) {
    if (x.empty() || y.empty() || z.empty()) return;
    Key key{3, 0, {x.size(), y.size(), z.size()}};
    std::vector<SideSpec> sides{single_span(x), single_span(y), single_span(z)};
    emit_with_choice(ctx, key, decide(key), sides, phi, -1);
  }

  void emit_with_choice(Ctx& ctx, const Key& key, const Choice& choice,
                        const std::vector<SideSpec>& sides, const PhaseAngle& phi, int ctrl) {
    // Counting never re-expands a subtree: compute once, splice totals.
    if (ctx.counting) {
      NodeCost nc = count_choice(key, choice);
      static_cast<CountingSink*>(ctx.sink)->absorb(nc.census, nc.ancilla_high);
      return;
    }
    emit_raw(ctx, key, choice, sides, phi, ctrl);
  }

  void emit_raw(Ctx& ctx, const Key& key, const Choice& choice,
                const std::vector<SideSpec>& sides, const PhaseAngle& phi, int ctrl) {
    switch (choice.kind) {
      case Choice::Kind::Base:
        emit_base(ctx, key, sides, phi, ctrl);
        break;
      case Choice::Kind::Chunk:
        emit_chunk(ctx, key, sides, phi, ctrl);
        break;
      case Choice::Kind::Recurse:
        if (key.arity == 2)
          emit_recurse(ctx, ToomMode::Double, key.w[0], choice.k, sides, phi, ctrl);
        else
          emit_recurse(ctx, ToomMode::Triple, key.w[0], choice.k, sides, phi, ctrl);
        break;
    }
  }

  void emit_base(Ctx& ctx, const Key& key, const std::vector<SideSpec>& sides,
                 const PhaseAngle& phi, int ctrl) {
    if (key.arity == 2) {
      emit_base_schoolbook(*ctx.sink, sides[0][0].bits, sides[1][0].bits, phi, ctrl,
                           ctx.counting);
      return;
    }
    if (cfg_.base_mode == BaseMode::SemiDigital)
      emit_base_semidigital(ctx, sides[0][0].bits, sides[1][0].bits, sides[2][0].bits, phi);
    else
      emit_base_schoolbook_triple(*ctx.sink, sides[0][0].bits, sides[1][0].bits,
                                  sides[2][0].bits, phi, ctx.counting);
  }

  void emit_chunk(Ctx& ctx, const Key& key, const std::vector<SideSpec>& sides,
                  const PhaseAngle& phi, int ctrl) {
    // Split the longest register into chunks of the shortest register's
    // width; each chunk contributes a product scaled by its offset.
    std::size_t arity = key.arity;
    std::size_t longest = 0, shortest = 0;
    for (std::size_t s = 1; s < arity; ++s) {
      if (sides[s][0].bits.size() > sides[longest][0].bits.size()) longest = s;
      if (sides[s][0].bits.size() < sides[shortest][0].bits.size()) shortest = s;
    }
    std::size_t w = sides[shortest][0].bits.size();
    const std::vector<int> big = sides[longest][0].bits;
    for (std::size_t off = 0; off < big.size(); off += w) {
      std::size_t len = std::min(w, big.size() - off);
      std::vector<int> chunk(big.begin() + static_cast<std::ptrdiff_t>(off),
                             big.begin() + static_cast<std::ptrdiff_t>(off + len));
      PhaseAngle sub = phi.scaled(Rational(BigInt::pow2(off)));
      std::vector<SideSpec> subsides = sides;
      subsides[longest] = single_span(chunk);
      Key k2{key.arity, key.ctrl, {subsides[0][0].bits.size(), subsides[1][0].bits.size(),
                                   key.arity == 3 ? subsides[2][0].bits.size() : 0}};
      emit_with_choice(ctx, k2, decide(k2), subsides, sub, ctrl);
    }
  }

  // ---- defect-tracked in-place builds ----

  struct BuiltSide {
    std::vector<int> window;
    std::vector<Gate> structure;  // forward structural gates, for unbuild
    bool built = true;
    bool signed_window = false;   // stored mode: value can be negative
    std::vector<std::pair<int, int>> owned_ancillas;
  };

  // Forwards gates and records them for exact reversal. Defect rotations
  // bypass the recorder (they go straight to the parent sink).
  struct RecordingSink final : GateSink {
    GateSink* inner = nullptr;
    std::vector<Gate>* record = nullptr;
    void on_gate(const Gate& g) override {
      inner->on_gate(g);
      record->push_back(g);
    }
    int alloc_ancilla(int count, const std::string& name) override {
      return inner->alloc_ancilla(count, name);
    }
    void release_ancilla(int first, int count) override { inner->release_ancilla(first, count); }
    int ancilla_in_flight() const override { return inner->ancilla_in_flight(); }
  };

  template <class RotateFn>
  BuiltSide build_side(Ctx& ctx, const SideSpec& side, RotateFn&& rotate) {
    if (cfg_.overflow_mode == OverflowMode::StoredAncilla)
      return build_side_stored(ctx, side);
    return build_side_zero(ctx, side, rotate);
  }

  // The normalized side has its +1-coefficient target at the back.
  template <class RotateFn>
  BuiltSide build_side_zero(Ctx& ctx, const SideSpec& side, RotateFn&& rotate) {
    BuiltSide out;
    const std::size_t tgt = side.size() - 1;
    out.window = side[tgt].bits;
    const std::size_t w = out.window.size();

    RecordingSink rec{};
    rec.inner = ctx.sink;
    rec.record = &out.structure;

    for (std::size_t t = 0; t + 1 < side.size(); ++t) {
      const Rational& c = side[t].coef;
      if (!is_pm_power_of_two(c) || !c.is_integer())
        throw std::logic_error("zero-ancilla build: addend coefficient must be +/-2^e");
      const bool negative = c.is_negative();
      const std::size_t e = c.num().abs().bit_length() - 1;
      const std::vector<int>& addend = side[t].bits;

      std::size_t avail = e < w ? w - e : 0;
      std::size_t len = std::min(avail, addend.size());

      int dirty = -1;
      if (len > 0) {
        dirty = find_dirty(side, tgt, t, e, len);
        if (dirty < 0) {
          // Borrow the addend's own top bit by stopping the sum one bit
          // early; its untaken value joins the stick-out rotations below.
          --len;
          dirty = addend[len];
        }
      }

      // Addend bits past the window: rotate directly.
      for (std::size_t i = len; i < addend.size(); ++i)
        rotate(addend[i], Rational((negative ? BigInt(-1) : BigInt(1)) * BigInt::pow2(e + i)));

      if (len == 0) continue;

      std::vector<int> tgt_range(out.window.begin() + static_cast<std::ptrdiff_t>(e),
                                 out.window.begin() + static_cast<std::ptrdiff_t>(e + len));
      std::vector<int> add_range(addend.begin(),
                                 addend.begin() + static_cast<std::ptrdiff_t>(len));

      // Dirty carry-in pre-compensation: -2^e d for adds, +2^e d for subs.
      rotate(dirty, Rational((negative ? BigInt(1) : BigInt(-1)) * BigInt::pow2(e)));

      if (negative)
        for (int q : tgt_range) emit_x(rec, q);
      int carry = cuccaro::first_half(rec, add_range, tgt_range, dirty);
      // The paused adder exposes the out-of-window carry: +/- 2^{e+len}.
      rotate(carry, Rational((negative ? BigInt(-1) : BigInt(1)) * BigInt::pow2(e + len)));
      cuccaro::second_half(rec, add_range, tgt_range, dirty);
      if (negative)
        for (int q : tgt_range) emit_x(rec, q);
    }
    return out;
  }

  // Most significant untouched bit on this side; ties to the lowest term.
  static int find_dirty(const SideSpec& side, std::size_t tgt, std::size_t cur_addend,
                        std::size_t e, std::size_t len) {
    int best = -1;
    std::size_t best_pos = 0, best_term = 0;
    for (std::size_t t = 0; t < side.size(); ++t) {
      const auto& bits = side[t].bits;
      for (std::size_t i = bits.size(); i-- > 0;) {
        bool touched = (t == cur_addend && i < len) || (t == tgt && i >= e && i < e + len);
        if (touched) continue;
        if (best < 0 || i > best_pos || (i == best_pos && t < best_term)) {
          best = bits[i];
          best_pos = i;
          best_term = t;
        }
        break;  // only each term's most significant untouched bit competes
      }
    }
    return best;
  }

  void unbuild_side(Ctx& ctx, const BuiltSide& b) {
    for (std::size_t i = b.structure.size(); i-- > 0;) ctx.sink->on_gate(b.structure[i]);
    for (auto [first, count] : b.owned_ancillas) ctx.sink->release_ancilla(first, count);
  }

  // Stored-mode generic build: widen the target with clean qubits so every
  // addition is exact two's complement; no defect rotations at all.
  BuiltSide build_side_stored(Ctx& ctx, const SideSpec& side) {
    BuiltSide out;
    const std::size_t tgt = side.size() - 1;

    BigInt lo(0), hi(0);
    for (const auto& t : side) {
      BigInt reach = t.coef.num() * (BigInt::pow2(t.bits.size()) - BigInt(1));
      if (reach.is_negative())
        lo += reach;
      else
        hi += reach;
    }
    const std::size_t W = width_needed(lo, hi);
    out.signed_window = lo.is_negative();

    std::size_t pad_need = 0;
    for (std::size_t t = 0; t + 1 < side.size(); ++t) {
      std::size_t e = side[t].coef.num().abs().bit_length() - 1;
      std::size_t range_len = e < W ? W - e : 0;
      if (range_len > side[t].bits.size())
        pad_need = std::max(pad_need, range_len - side[t].bits.size());
    }

    RecordingSink rec{};
    rec.inner = ctx.sink;
    rec.record = &out.structure;

    out.window = side[tgt].bits;
    if (out.window.size() < W) {
      int count = static_cast<int>(W - out.window.size());
      int first = ctx.sink->alloc_ancilla(count, "ovf");
      for (int i = 0; i < count; ++i) out.window.push_back(first + i);
      out.owned_ancillas.push_back({first, count});
    }
    int carry = ctx.sink->alloc_ancilla(1, "cin");
    out.owned_ancillas.push_back({carry, 1});
    int pad = -1;
    if (pad_need) {
      pad = ctx.sink->alloc_ancilla(static_cast<int>(pad_need), "pad");
      out.owned_ancillas.push_back({pad, static_cast<int>(pad_need)});
    }

    for (std::size_t t = 0; t + 1 < side.size(); ++t) {
      const Rational& c = side[t].coef;
      if (!is_pm_power_of_two(c) || !c.is_integer())
        throw std::logic_error("stored build: addend coefficient must be +/-2^e");
      std::size_t e = c.num().abs().bit_length() - 1;
      emit_stored_add(rec, out.window, side[t].bits, e, c.is_negative(), carry, pad, false);
    }
    return out;
  }

  // dst[e..] += 2^e * addend (or -=). A short addend is padded with clean
  // zeros; `discharge` runs the adder from bit 0 with carry-in forced to 1,
  // completing a preceding complement into an exact negation.
  void emit_stored_add(GateSink& sink, const std::vector<int>& dst,
                       const std::vector<int>& addend, std::size_t e, bool negative, int carry,
                       int pad_first, bool discharge) {
    std::size_t W = dst.size();
    std::size_t start = discharge ? 0 : e;
    if (start >= W) return;
    std::vector<int> range(dst.begin() + static_cast<std::ptrdiff_t>(start), dst.end());
    std::vector<int> abits;
    if (discharge)
      for (std::size_t i = 0; i < e; ++i) abits.push_back(pad_first + static_cast<int>(i));
    for (std::size_t i = 0; i < addend.size() && abits.size() < range.size(); ++i)
      abits.push_back(addend[i]);
    int pad_next = pad_first + static_cast<int>(e);
    while (abits.size() < range.size()) abits.push_back(pad_next++);
    if (negative)
      for (int q : range) emit_x(sink, q);
    if (discharge) emit_x(sink, carry);
    cuccaro::add(sink, abits, range, carry);
    if (discharge) emit_x(sink, carry);
    if (negative)
      for (int q : range) emit_x(sink, q);
  }

  // ---- recursion bodies ----

  static std::vector<std::vector<int>> split_span(const std::vector<int>& span,
                                                  const std::vector<std::size_t>& widths) {
    std::vector<std::vector<int>> pieces;
    std::size_t off = 0;
    for (std::size_t w : widths) {
      pieces.emplace_back(span.begin() + static_cast<std::ptrdiff_t>(off),
                          span.begin() + static_cast<std::ptrdiff_t>(off + w));
      off += w;
    }
    return pieces;
  }

  void emit_recurse(Ctx& ctx, ToomMode mode, std::size_t n, std::size_t k,
                    const std::vector<SideSpec>& sides, const PhaseAngle& phi, int ctrl) {
    if (cfg_.overflow_mode == OverflowMode::ZeroAncilla)
      emit_zero_points(ctx, mode, n, k, sides, phi, ctrl);
    else
      emit_stored_points(ctx, mode, n, k, sides, phi, ctrl);
  }

  // Zero-ancilla recursion: every point is handled independently from
  // pristine pieces; points 0 and infinity collapse to a single piece.
  void emit_zero_points(Ctx& ctx, ToomMode mode, std::size_t n, std::size_t k,
                        const std::vector<SideSpec>& sides, const PhaseAngle& phi, int ctrl) {
    const PlanData& pd = plan_data(n, k, mode);
    const ToomPlan& plan = pd.plan;
    std::vector<std::vector<std::vector<int>>> pieces;
    for (const auto& s : sides) pieces.push_back(split_span(s[0].bits, plan.piece_widths));

    for (std::size_t l = 0; l < plan.q; ++l) {
      const Rational& phi_l = pd.phi.entries[l];
      if (phi_l.is_zero()) continue;
      std::vector<SideSpec> point_sides(sides.size());
      for (std::size_t s = 0; s < sides.size(); ++s)
        for (std::size_t j = 0; j < k; ++j) {
          Rational coef(plan.piece_coefficient(l, j));
          if (coef.is_zero() || pieces[s][j].empty()) continue;
          point_sides[s].push_back({pieces[s][j], coef});
        }
      PhaseAngle sub = phi.scaled(phi_l);
      if (mode == ToomMode::Double)
        phase_product(ctx, point_sides[0], point_sides[1], sub, ctrl);
      else
        phase_triple(ctx, point_sides[0], point_sides[1], point_sides[2], sub);
    }
  }

  // ---- stored-ancilla schedule-driven recursion ----

  struct StoredSide {
    std::vector<std::vector<int>> regs;
    std::vector<bool> written;
    std::vector<std::pair<int, int>> piece_ext_alloc;
    std::vector<int> shift_parked;
    int carry = -1;
    int pad_first = -1;
    int pad_count = 0;
    bool pending_negate = false;
    std::size_t step_pos = 0;
  };

  // Inclusive value bounds of a linear combination of the pieces.
  static void range_of(const LinExpr& e, const std::vector<std::size_t>& widths, BigInt& lo,
                       BigInt& hi) {
    lo = BigInt(0);
    hi = BigInt(0);
    for (std::size_t j = 0; j < widths.size(); ++j) {
      const Rational& c = e.coeff(j);
      if (c.is_zero()) continue;
      BigInt reach = c.num() * (BigInt::pow2(widths[j]) - BigInt(1));
      if (!c.is_integer()) reach = reach / c.den();  // transient exact divisions only
      if (reach.is_negative())
        lo += reach;
      else
        hi += reach;
    }
  }

  static std::size_t width_needed(const BigInt& lo, const BigInt& hi) {
    if (!lo.is_negative()) return std::max<std::size_t>(hi.bit_length(), 1);
    return 1 + std::max<std::size_t>(hi.bit_length(), lo.abs().bit_length());
  }

  // Per-piece extended widths (sized from signed value ranges; every
  // schedule source stays nonnegative, so sources never need sign
  // extension), pad requirement, and per-product sign flags.
  void analyze_schedule(PlanData& pd) const {
    const ToomPlan& plan = pd.plan;
    const AdderSchedule& sched = pd.schedule;
    std::vector<LinExpr> state;
    for (std::size_t i = 0; i < plan.k; ++i) state.push_back(LinExpr::symbol(plan.k, i));
    pd.piece_ext.assign(plan.k, 0);
    std::size_t pos = 0;
    std::size_t prod_idx = 0;
    pd.product_signed.assign(sched.products.size(), false);
    auto flush_products = [&]() {
      while (prod_idx < sched.products.size() &&
             sched.products[prod_idx].steps_done == pos) {
        const auto& pr = sched.products[prod_idx];
        BigInt lo, hi;
        range_of(state[pr.target], plan.piece_widths, lo, hi);
        pd.product_signed[prod_idx] = lo.is_negative();
        ++prod_idx;
      }
    };
    flush_products();
    pd.ext_alloc_before.assign(sched.steps.size(), {});
    pd.ext_release_after.assign(sched.steps.size(), {});
    std::vector<bool> live(plan.k, false);
    for (std::size_t si = 0; si < sched.steps.size(); ++si) {
      const auto& st = sched.steps[si];
      if (!live[st.dst]) {
        live[st.dst] = true;
        pd.ext_alloc_before[si].push_back(st.dst);
      }
      AdderSchedule one;
      one.k = sched.k;
      one.steps = {st};
      state = symbolic_execute_schedule(one, state);
      ++pos;
      BigInt lo, hi;
      range_of(state[st.dst], plan.piece_widths, lo, hi);
      pd.piece_ext[st.dst] = std::max(pd.piece_ext[st.dst], width_needed(lo, hi));
      if (state[st.dst] == LinExpr::symbol(plan.k, st.dst)) {
        live[st.dst] = false;
        pd.ext_release_after[si].push_back(st.dst);
      }
      flush_products();
    }
    pd.ext_width = pd.piece_ext[plan.k - 1];
    // Zero padding: widest gap between an addend and its adder range.
    std::size_t pad = 0;
    bool pending = false;
    for (const auto& st : sched.steps) {
      if (st.kind == AdderStep::Kind::Negate) {
        pending = true;
        continue;
      }
      if (st.kind != AdderStep::Kind::Add) continue;
      std::size_t W = pd.piece_ext[st.dst];
      std::size_t avail = pd.piece_ext[st.src] ? pd.piece_ext[st.src]
                                               : plan.piece_widths[st.src];
      std::size_t range_len = pending ? W : (st.shift < W ? W - st.shift : 0);
      std::size_t lead = pending ? st.shift : 0;
      std::size_t need = lead + (range_len > lead + avail ? range_len - lead - avail : 0);
      pad = std::max(pad, need);
      pending = false;
    }
    pd.pad_need = pad;
  }

  void emit_stored_points(Ctx& ctx, ToomMode mode, std::size_t n, std::size_t k,
                          const std::vector<SideSpec>& sides, const PhaseAngle& phi, int ctrl) {
    const PlanData& pd = plan_data(n, k, mode);
    const ToomPlan& plan = pd.plan;
    const AdderSchedule& sched = pd.schedule;

    std::vector<StoredSide> ss(sides.size());
    for (std::size_t s = 0; s < sides.size(); ++s) {
      ss[s].regs = split_span(sides[s][0].bits, plan.piece_widths);
      ss[s].written.assign(k, false);
    }
    for (const auto& st : sched.steps)
      for (auto& side : ss) side.written[st.dst] = true;

    auto extend_piece = [&](StoredSide& side, std::size_t j) {
      std::size_t W = pd.piece_ext[j];
      if (side.regs[j].size() >= W) return;
      int count = static_cast<int>(W - side.regs[j].size());
      int first = ctx.sink->alloc_ancilla(count, "ovf");
      for (int i = 0; i < count; ++i) side.regs[j].push_back(first + i);
      side.piece_ext_alloc[j] = {first, count};
    };
    auto retire_piece = [&](StoredSide& side, std::size_t j) {
      auto [first, count] = side.piece_ext_alloc[j];
      if (count == 0) return;
      side.regs[j].resize(side.regs[j].size() - static_cast<std::size_t>(count));
      ctx.sink->release_ancilla(first, count);
      side.piece_ext_alloc[j] = {-1, 0};
    };
    for (auto& side : ss) side.piece_ext_alloc.assign(k, {-1, 0});
    // Adder workspace is clean between additions; each side grabs it only
    // while its own additions run, so one block serves every side and is
    // free for deeper levels during the recursive calls.
    auto grab_workspace = [&](StoredSide& side) {
      side.carry = ctx.sink->alloc_ancilla(1, "cin");
      if (pd.pad_need) {
        side.pad_first = ctx.sink->alloc_ancilla(static_cast<int>(pd.pad_need), "pad");
        side.pad_count = static_cast<int>(pd.pad_need);
      }
    };
    auto drop_workspace = [&](StoredSide& side) {
      ctx.sink->release_ancilla(side.carry, 1);
      if (side.pad_count) ctx.sink->release_ancilla(side.pad_first, side.pad_count);
      side.carry = -1;
      side.pad_first = -1;
      side.pad_count = 0;
    };

    auto run_side_to = [&](std::size_t s, std::size_t until) {
      auto& side = ss[s];
      if (side.step_pos >= until) return;
      grab_workspace(side);
      while (side.step_pos < until) {
        std::size_t si = side.step_pos;
        const AdderStep& st = sched.steps[side.step_pos++];
        for (std::size_t j : pd.ext_alloc_before[si]) extend_piece(side, j);
        switch (st.kind) {
          case AdderStep::Kind::Negate:
            for (int q : side.regs[st.dst]) emit_x(*ctx.sink, q);
            side.pending_negate = true;
            break;
          case AdderStep::Kind::Shift:
            if (st.sign >= 0) {
              // value <<= shift: fresh zeros below, zero top bits parked
              for (std::size_t i = 0; i < st.shift; ++i) {
                int a = ctx.sink->alloc_ancilla(1, "sh");
                side.regs[st.dst].insert(side.regs[st.dst].begin(), a);
                side.shift_parked.push_back(side.regs[st.dst].back());
                side.regs[st.dst].pop_back();
              }
            } else {
              for (std::size_t i = 0; i < st.shift; ++i) {
                side.regs[st.dst].push_back(side.shift_parked.back());
                side.shift_parked.pop_back();
                int low = side.regs[st.dst].front();
                side.regs[st.dst].erase(side.regs[st.dst].begin());
                ctx.sink->release_ancilla(low, 1);
              }
            }
            break;
          case AdderStep::Kind::Add: {
            bool discharge = side.pending_negate;
            side.pending_negate = false;
            if (discharge && st.sign < 0)
              throw std::logic_error("stored emit: complement must discharge into an addition");
            emit_stored_add(*ctx.sink, side.regs[st.dst], side.regs[st.src], st.shift,
                            st.sign < 0, side.carry, side.pad_first, discharge);
            break;
          }
        }
        for (std::size_t j : pd.ext_release_after[si]) retire_piece(side, j);
      }
      drop_workspace(side);
    };

    for (std::size_t pi = 0; pi < sched.products.size(); ++pi) {
      const auto& prod = sched.products[pi];
      for (std::size_t s = 0; s < sides.size(); ++s) run_side_to(s, prod.steps_done);
      Rational phi_l = pd.phi.entries[prod.point_index];
      if (phi_l.is_zero()) continue;
      if (mode == ToomMode::Triple && prod.proportionality < 0) phi_l = -phi_l;
      PhaseAngle sub = phi.scaled(phi_l);
      std::vector<std::vector<int>> windows;
      for (auto& side : ss) windows.push_back(side.regs[prod.target]);
      if (pd.product_signed[pi]) {
        std::vector<bool> flags(windows.size(), true);
        emit_sign_corrections(ctx, windows, flags, sub, ctrl);
      }
      if (mode == ToomMode::Double)
        pp_core(ctx, windows[0], windows[1], sub, ctrl);
      else
        pt_core(ctx, windows[0], windows[1], windows[2], sub);
    }
    for (std::size_t s = 0; s < sides.size(); ++s) run_side_to(s, sched.steps.size());
  }

  // Signed windows hold C mod 2^W in two's complement: C = R - 2^W nu with
  // nu the top bit (unsigned windows have C = R and need nothing). The main
  // recursion supplies phi * prod R_i; these rotations supply every cross
  // term that involves at least one sign bit.
  void emit_sign_corrections(Ctx& ctx, const std::vector<std::vector<int>>& windows,
                             const std::vector<bool>& flags, const PhaseAngle& phi, int ctrl) {
    auto sgn = [&](std::size_t i) {
      return Rational(BigInt(-1) * BigInt::pow2(windows[i].size()));
    };
    if (windows.size() == 2) {
      if (flags[0])
        rotate_vs_window(ctx, ctrl, windows[0].back(), windows[1], phi.scaled(sgn(0)));
      if (flags[1])
        rotate_vs_window(ctx, ctrl, windows[1].back(), windows[0], phi.scaled(sgn(1)));
      if (flags[0] && flags[1])
        emit_phase_on_bits(*ctx.sink, ctrl, windows[0].back(), windows[1].back(),
                           angle_of(ctx, phi, sgn(0) * sgn(1)));
      return;
    }
    int nu[3] = {windows[0].back(), windows[1].back(), windows[2].back()};
    for (std::size_t i = 0; i < 3; ++i) {
      std::size_t j = (i + 1) % 3, l = (i + 2) % 3;
      if (!flags[i]) continue;
      // s_i * R_j * R_l
      phase_product(ctx, single_span(windows[j]), single_span(windows[l]), phi.scaled(sgn(i)),
                    nu[i]);
      // s_i * s_j * R_l (emitted once per unordered {i, j})
      if (j > i && flags[j])
        for (std::size_t b = 0; b < windows[l].size(); ++b)
          emit_phase_on_bits(*ctx.sink, nu[i], nu[j], windows[l][b],
                             angle_of(ctx, phi, sgn(i) * sgn(j) * Rational(BigInt::pow2(b))));
      if (l > i && flags[l])
        for (std::size_t b = 0; b < windows[j].size(); ++b)
          emit_phase_on_bits(*ctx.sink, nu[i], nu[l], windows[j][b],
                             angle_of(ctx, phi, sgn(i) * sgn(l) * Rational(BigInt::pow2(b))));
    }
    if (flags[0] && flags[1] && flags[2])
      emit_phase_on_bits(*ctx.sink, nu[0], nu[1], nu[2],
                         angle_of(ctx, phi, sgn(0) * sgn(1) * sgn(2)));
  }

  // ---- semi-digital base case (triple) ----

  void emit_base_semidigital(Ctx& ctx, const std::vector<int>& x, const std::vector<int>& y,
                             const std::vector<int>& z, const PhaseAngle& phi) {
    const std::size_t wx = x.size(), wy = y.size();
    std::vector<Gate> structure;
    RecordingSink rec{};
    rec.inner = ctx.sink;
    rec.record = &structure;

    int scratch0 = ctx.sink->alloc_ancilla(static_cast<int>(wx + wy), "prod");
    int row0 = ctx.sink->alloc_ancilla(static_cast<int>(wy + 1), "row");
    int cin = ctx.sink->alloc_ancilla(1, "cin");
    std::vector<int> scratch(wx + wy), row(wy + 1);
    for (std::size_t i = 0; i < scratch.size(); ++i) scratch[i] = scratch0 + static_cast<int>(i);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = row0 + static_cast<int>(i);

    // scratch <- x * y, one partial-product row at a time.
    for (std::size_t i = 0; i < wx; ++i) {
      for (std::size_t j = 0; j < wy; ++j) emit_toffoli(rec, x[i], y[j], row[j]);
      std::size_t len = std::min(wy + 1, wx + wy - i);
      std::vector<int> dst(scratch.begin() + static_cast<std::ptrdiff_t>(i),
                           scratch.begin() + static_cast<std::ptrdiff_t>(i + len));
      std::vector<int> abits(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(len));
      cuccaro::add(rec, abits, dst, cin);
      for (std::size_t j = 0; j < wy; ++j) emit_toffoli(rec, x[i], y[j], row[j]);
    }
    for (std::size_t b = 0; b < scratch.size(); ++b)
      for (std::size_t l = 0; l < z.size(); ++l)
        emit_crphi(*ctx.sink, scratch[b], z[l], angle_of(ctx, phi, Rational(BigInt::pow2(b + l))));
    for (std::size_t i = structure.size(); i-- > 0;) ctx.sink->on_gate(structure[i]);
    ctx.sink->release_ancilla(cin, 1);
    ctx.sink->release_ancilla(row0, static_cast<int>(wy + 1));
    ctx.sink->release_ancilla(scratch0, static_cast<int>(wx + wy));
  }
};

}  // namespace qmf
