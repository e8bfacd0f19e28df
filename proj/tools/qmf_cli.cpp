// Command-line front end: circuit synthesis, verification against analytic
// specs, resource estimation, and the bundled-sequence checker. JSON is the
// canonical interchange format; text output is render-only.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qmf/circuit_json.hpp"
#include "qmf/estimator.hpp"
#include "qmf/modmul_eval.hpp"
#include "qmf/multiplier.hpp"
#include "qmf/sequences.hpp"
#include "qmf/simulator.hpp"

using namespace qmf;

namespace {

#ifndef QMF_ASSET_DIR
#define QMF_ASSET_DIR "assets"
#endif

// Bit widths accept a convenience suffix: 2k = 2048, 4k = 4096, ...
std::size_t parse_bits(const std::string& s) {
  if (!s.empty() && (s.back() == 'k' || s.back() == 'K'))
    return std::stoull(s.substr(0, s.size() - 1)) * 1024;
  return std::stoull(s);
}

std::uint64_t seed_from_env(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("QMF_SEED")) return std::stoull(env);
  return flag_seed;
}

struct CommonOpts {
  std::string k = "auto";
  std::size_t n_base_double = 8;
  std::size_t n_base_triple = 4;
  std::string overflow = "stored";
  std::string base = "schoolbook";
  std::string qft = "standard";
  double eta = 1e-12;
  bool prune = true;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--k", o.k, "split count: 'auto', 'schoolbook', or a fixed k >= 2");
  cmd->add_option("--n-base", o.n_base_double, "base-case threshold (two-register products)");
  cmd->add_option("--n-base-triple", o.n_base_triple, "base-case threshold (triple products)");
  cmd->add_option("--overflow", o.overflow, "zero | stored")
      ->check(CLI::IsMember({"zero", "stored"}));
  cmd->add_option("--base", o.base, "schoolbook | semi_digital")
      ->check(CLI::IsMember({"schoolbook", "semi_digital"}));
  cmd->add_option("--qft", o.qft, "standard | fast | gradient | none")
      ->check(CLI::IsMember({"standard", "fast", "gradient", "none"}));
  cmd->add_option("--eta", o.eta, "per-qubit precision for pruning / output padding");
  cmd->add_flag("--no-prune{false}", o.prune, "disable QFT rotation pruning");
}

CompileConfig compile_config(const CommonOpts& o, bool triple) {
  CompileConfig cfg;
  if (o.k == "auto")
    cfg.k_policy = KPolicy::auto_search();
  else if (o.k == "schoolbook")
    cfg.k_policy = KPolicy::schoolbook_only();
  else
    cfg.k_policy = KPolicy::fixed(std::stoull(o.k));
  cfg.n_base_double = o.n_base_double;
  cfg.n_base_triple = o.n_base_triple;
  cfg.overflow_mode = o.overflow == "zero" ? OverflowMode::ZeroAncilla
                                           : OverflowMode::StoredAncilla;
  cfg.base_mode = o.base == "semi_digital" ? BaseMode::SemiDigital : BaseMode::Schoolbook;
  if (cfg.base_mode == BaseMode::SemiDigital && !triple)
    throw CLI::ValidationError("--base semi_digital applies to qq (triple) synthesis only");
  return cfg;
}

QftConfig qft_config(const CommonOpts& o) {
  QftConfig q;
  if (o.qft == "fast") q.variant = QftConfig::Variant::Fast;
  if (o.qft == "gradient") q.variant = QftConfig::Variant::PhaseGradient;
  q.prune = o.prune;
  q.pruning_threshold = o.eta;
  return q;
}

void write_output(const nlohmann::json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << "\n";
}

int cmd_synth(const std::string& mode, const std::string& n_flag, const std::string& nout_flag,
              double phi, bool with_qft, const CommonOpts& o, std::uint64_t seed,
              const std::string& out, const std::string& format) {
  std::size_t n = parse_bits(n_flag);
  std::size_t n_out = nout_flag.empty() ? n : parse_bits(nout_flag);
  bool triple = mode == "qq";
  MultiplierConfig mcfg;
  mcfg.compile = compile_config(o, triple);
  mcfg.qft = qft_config(o);

  Circuit circuit;
  nlohmann::json meta;
  meta["seed"] = seed;
  if (with_qft) {
    if (triple) {
      auto mc = u_qq(n, n, n_out, mcfg);
      circuit = std::move(mc.circuit);
      meta["kind"] = "u_qq";
      meta["a"] = 1;
      meta["n_x"] = n;
      meta["n_y"] = n;
      meta["n_w"] = n_out;
    } else {
      auto mc = u_cq(Rational(1), n, n_out, mcfg);
      circuit = std::move(mc.circuit);
      meta["kind"] = "u_cq";
      meta["a"] = 1;
      meta["n_x"] = n;
      meta["n_w"] = n_out;
    }
  } else {
    PhaseCompiler pc(mcfg.compile);
    circuit = triple ? pc.compile_phase_triple(n, n, n_out, phi)
                     : pc.compile_phase_product(n, n_out, phi);
    meta["kind"] = triple ? "phase_triple" : "phase_product";
    meta["phi"] = phi;
    meta["widths"] = triple ? nlohmann::json{n, n, n_out} : nlohmann::json{n, n_out};
  }
  const auto& census = circuit.census();
  std::cerr << "gates: toffoli=" << census.toffoli << " crphi=" << census.crphi
            << " ccrphi=" << census.ccrphi << " rphi=" << census.rphi
            << " clifford=" << census.clifford << " qubits=" << circuit.qubit_count()
            << " ancilla_high_water=" << circuit.ancilla_high_water() << "\n";
  if (format == "text") {
    if (out.empty() || out == "-") {
      std::cout << circuit_to_text(circuit);
    } else {
      std::ofstream f(out);
      f << circuit_to_text(circuit);
    }
  } else {
    write_output(circuit_to_json(circuit, meta), out);
  }
  return 0;
}

int cmd_verify(const std::string& in, std::string spec, int qubit_limit) {
  std::ifstream f(in);
  if (!f) throw std::runtime_error("cannot open " + in);
  nlohmann::json j = nlohmann::json::parse(f);
  nlohmann::json meta;
  Circuit c = circuit_from_json(j, &meta);
  if (spec == "auto") {
    if (!meta.contains("kind"))
      throw std::runtime_error("circuit file has no meta.kind; pass --spec");
    std::string kind = meta.at("kind");
    if (kind == "phase_product" || kind == "phase_triple") spec = "phase-product";
    else if (kind == "u_cq" || kind == "u_qq") spec = "multiplier";
    else if (kind == "qft") spec = "qft";
    else throw std::runtime_error("unknown meta.kind " + kind);
  }
  SimConfig scfg;
  scfg.qubit_limit = qubit_limit;
  Simulator sim(scfg);

  double dev = 0;
  if (spec == "phase-product") {
    double phi = meta.at("phi").get<double>();
    auto widths = meta.at("widths");
    std::vector<std::pair<int, int>> spans;
    int off = 0;
    for (const auto& w : widths) {
      spans.push_back({off, w.get<int>()});
      off += w.get<int>();
    }
    dev = verify_diagonal(c, sim, [&](std::uint64_t b) {
      double prod = phi;
      for (auto [o2, w] : spans) {
        std::uint64_t v = (b >> o2) & ((std::uint64_t(1) << w) - 1);
        prod *= double(v);
      }
      return prod;
    });
  } else if (spec == "multiplier") {
    std::string kind = meta.at("kind");
    std::size_t nx = meta.at("n_x").get<std::size_t>();
    std::size_t nw = meta.at("n_w").get<std::size_t>();
    std::uint64_t a = meta.value("a", 1);
    auto t = action_table(c, sim);
    for (std::uint64_t b = 0; b < t.output.size(); ++b) {
      std::uint64_t want;
      if (kind == "u_cq") {
        std::uint64_t x = b & ((1ull << nx) - 1), w = b >> nx;
        want = x | (((w + a * x) & ((1ull << nw) - 1)) << nx);
      } else {
        std::size_t ny = meta.at("n_y").get<std::size_t>();
        std::uint64_t x = b & ((1ull << nx) - 1);
        std::uint64_t y = (b >> nx) & ((1ull << ny) - 1);
        std::uint64_t w = b >> (nx + ny);
        want = x | (y << nx) | (((w + x * y) & ((1ull << nw) - 1)) << (nx + ny));
      }
      if (t.output[b] != want) {
        dev = 1.0;
        break;
      }
      dev = std::max(dev, std::abs(std::abs(t.phase[b]) - 1.0));
      dev = std::max(dev, std::abs(std::arg(t.phase[b])));
    }
  } else if (spec == "qft") {
    std::size_t n = meta.at("n").get<std::size_t>();
    std::size_t dim = std::size_t(1) << n;
    double inv = 1.0 / std::sqrt(double(dim));
    for (std::uint64_t x = 0; x < dim && dev < 1.0; ++x) {
      auto sv = sim.run(c, x);
      for (std::uint64_t z = 0; z < dim; ++z) {
        cdouble want = std::polar(inv, 2.0 * std::numbers::pi * double(x * z) / double(dim));
        dev = std::max(dev, std::abs(sv.amp(z) - want));
      }
    }
  } else if (spec == "mod-multiplier") {
    BigInt N = BigInt::from_string(meta.at("N").get<std::string>());
    BigInt cc = BigInt::from_string(meta.at("c").get<std::string>());
    double eta = meta.at("eta").get<double>();
    ModMulEvaluator ev(cc, N, eta);
    double worst = 1.0;
    for (std::uint64_t x = 0; x < N.to_u64(); ++x)
      worst = std::min(worst, ev.fidelity(x));
    std::cout << "min fidelity " << worst << " (budget " << 1.0 - 10.0 * eta << ")\n";
    return worst >= 1.0 - 10.0 * eta ? 0 : 1;
  } else {
    throw std::runtime_error("unknown spec " + spec);
  }
  std::cout << "max deviation " << dev << "\n";
  bool pass = dev < 1e-9;
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int cmd_estimate(const std::string& n_flag, const std::string& mode, const CommonOpts& o,
                 const std::string& out, bool text) {
  std::size_t n = parse_bits(n_flag);
  EstimatorConfig cfg;
  cfg.compile = compile_config(o, mode == "qq");
  cfg.qft = qft_config(o);
  cfg.eta = o.eta;
  Estimator est(cfg);
  CostReport r;
  if (o.qft == "none")
    r = mode == "qq" ? est.estimate_phase_triple(n) : est.estimate_phase_product(n);
  else
    r = est.estimate_multiplier(n);

  nlohmann::json j;
  j["n"] = n;
  j["config"] = {{"k", o.k},     {"overflow", o.overflow},      {"base", o.base},
                 {"qft", o.qft}, {"eta", o.eta},                {"n_base", o.n_base_double},
                 {"mode", mode}};
  j["counts"] = {{"toffoli", r.counts.toffoli},
                 {"crphi", r.counts.crphi + r.counts.ccrphi},
                 {"clifford", r.counts.clifford},
                 {"rphi", r.counts.rphi},
                 {"measurements", r.counts.measure}};
  j["ancillas"] = r.ancillas;
  j["total_qubits"] = r.total_qubits;
  nlohmann::json ktree = nlohmann::json::array();
  for (const auto& [key, k] : r.k_tree)
    ktree.push_back({{"arity", key.first}, {"width", key.second}, {"k", k}});
  j["k_tree"] = ktree;
  if (text) {
    auto fmt = [](std::uint64_t v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2fM", double(v) / 1e6);
      return std::string(buf);
    };
    std::cout << "n=" << n << "  Toffoli " << fmt(r.counts.toffoli) << "  CRphi "
              << fmt(r.counts.crphi + r.counts.ccrphi) << "  H,X,CNOT "
              << fmt(r.counts.clifford) << "  ancillas " << r.ancillas << "\n";
  }
  write_output(j, out);
  return 0;
}

int cmd_sequences(const std::string& dir) {
  auto seqs = load_sequences(dir);
  int passed = 0;
  for (const auto& seq : seqs) {
    auto verdict = verify_sequence(seq, seq.points);
    std::cout << seq.name << ": " << (verdict.pass ? "pass" : "FAIL " + verdict.diagnostic)
              << "\n";
    if (verdict.pass) ++passed;
  }
  std::cout << passed << "/" << seqs.size() << " pass\n";
  return passed == int(seqs.size()) ? 0 : 1;
}

int cmd_qft_check(const std::string& n_flag, const std::string& variant) {
  std::size_t n = parse_bits(n_flag);
  QftConfig cfg;
  if (variant == "fast") cfg = QftConfig::fast(2);
  if (variant == "gradient") cfg.variant = QftConfig::Variant::PhaseGradient;
  QftBuilder qb(cfg);
  auto c = qb.qft_circuit(n);
  Simulator sim;
  std::size_t dim = std::size_t(1) << n;
  double inv = 1.0 / std::sqrt(double(dim)), dev = 0;
  for (std::uint64_t x = 0; x < dim; ++x) {
    auto sv = sim.run(c, x);  // any ancilla registers sit above bit n, start |0>
    for (std::uint64_t z = 0; z < dim; ++z) {
      cdouble want = std::polar(inv, 2.0 * std::numbers::pi * double(x * z) / double(dim));
      dev = std::max(dev, std::abs(sv.amp(z) - want));
    }
  }
  std::cout << "qft(" << variant << ", n=" << n << ") max deviation " << dev << "\n";
  bool pass = dev < 1e-9;
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int cmd_modmul_check(const std::string& N_s, const std::string& c_s, double eta,
                     long long x_flag) {
  BigInt N = BigInt::from_string(N_s);
  BigInt c = BigInt::from_string(c_s);
  ModMulEvaluator ev(c, N, eta);
  std::cout << "n=" << ev.n() << " m=" << ev.m() << " total qubits " << ev.total_qubits()
            << "\n";
  double worst = 1.0;
  if (x_flag >= 0) {
    worst = ev.fidelity(static_cast<std::uint64_t>(x_flag));
    std::cout << "fidelity(x=" << x_flag << ") = " << worst << "\n";
  } else {
    for (std::uint64_t x = 0; x < N.to_u64(); ++x) worst = std::min(worst, ev.fidelity(x));
    std::cout << "min fidelity over all x: " << worst << "\n";
  }
  bool pass = worst >= 1.0 - 10.0 * eta;
  std::cout << (pass ? "PASS" : "FAIL") << " (budget " << 1.0 - 10.0 * eta << ")\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase-product multiplier toolkit: synthesis, verification, estimation"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "compile a circuit and write its JSON");
  std::string s_mode = "cq", s_n, s_nout, s_out, s_format = "json";
  double s_phi = 0.5;
  bool s_with_qft = false;
  std::uint64_t s_seed = 0;
  CommonOpts s_opts;
  synth->add_option("--mode", s_mode, "cq | qq")->check(CLI::IsMember({"cq", "qq"}));
  synth->add_option("--n", s_n, "input width in bits (suffix k = x1024)")->required();
  synth->add_option("--n-out", s_nout, "output register width (defaults to --n)");
  synth->add_option("--phi", s_phi, "phase for the bare product (radians)");
  synth->add_flag("--with-qft", s_with_qft, "wrap in the QFT sandwich (full multiplier)");
  synth->add_option("--seed", s_seed, "seed recorded in the output (QMF_SEED overrides)");
  synth->add_option("--out,-o", s_out, "output path (default stdout)");
  synth->add_option("--format", s_format, "json | text")->check(CLI::IsMember({"json", "text"}));
  add_common(synth, s_opts);

  auto* verify = app.add_subcommand("verify", "check a circuit file against an analytic spec");
  std::string v_in, v_spec = "auto";
  int v_limit = 24;
  verify->add_option("--in,-i", v_in, "circuit JSON")->required();
  verify->add_option("--spec", v_spec,
                     "auto | phase-product | multiplier | mod-multiplier | qft");
  verify->add_option("--qubit-limit", v_limit, "simulator ceiling");

  auto* estimate = app.add_subcommand("estimate", "memoized resource estimate");
  std::string e_n, e_mode = "cq", e_out;
  bool e_text = false;
  CommonOpts e_opts;
  estimate->add_option("--n", e_n, "width in bits (suffix k = x1024)")->required();
  estimate->add_option("--mode", e_mode, "cq | qq")->check(CLI::IsMember({"cq", "qq"}));
  estimate->add_option("--out,-o", e_out, "report path (default stdout)");
  estimate->add_flag("--text", e_text, "print a one-line table row");
  add_common(estimate, e_opts);

  auto* sequences = app.add_subcommand("sequences", "verify the bundled parallel sequences");
  std::string q_dir = QMF_ASSET_DIR;
  sequences->add_option("--dir", q_dir, "asset directory");

  auto* qftc = app.add_subcommand("qft-check", "compare a QFT variant with the exact transform");
  std::string f_n = "6", f_variant = "fast";
  qftc->add_option("--n", f_n, "register width");
  qftc->add_option("--variant", f_variant, "fast | gradient | standard");

  auto* mm = app.add_subcommand("modmul-check", "fidelity of the in-place modular multiply");
  std::string m_N = "7", m_c = "3";
  double m_eta = 1e-3;
  long long m_x = -1;
  mm->add_option("--N", m_N, "modulus")->required();
  mm->add_option("--c", m_c, "classical multiplier (gcd(c, N) = 1)")->required();
  mm->add_option("--eta", m_eta, "error budget");
  mm->add_option("--x", m_x, "single input (default: all x < N)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed())
      return cmd_synth(s_mode, s_n, s_nout, s_phi, s_with_qft, s_opts, seed_from_env(s_seed),
                       s_out, s_format);
    if (verify->parsed()) return cmd_verify(v_in, v_spec, v_limit);
    if (estimate->parsed()) return cmd_estimate(e_n, e_mode, e_opts, e_out, e_text);
    if (sequences->parsed()) return cmd_sequences(q_dir);
    if (qftc->parsed()) return cmd_qft_check(f_n, f_variant);
    if (mm->parsed()) return cmd_modmul_check(m_N, m_c, m_eta, m_x);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
