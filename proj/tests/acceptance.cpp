// Acceptance gate: one line per criterion, PASS or FAIL, with the measured
// numbers inline. Run all criteria by default or a single one with
// --criterion N. Exit 0 only if every criterion run here passed.
//
// Criterion 2 is expected to FAIL: the closed-form gap is not the band
// minimum when t_so < t_s and |gamma_z| < 2 sqrt(t_s^2 - t_so^2) (the true
// minimum sits at an interior k; see bulk_gap_check). The line prints the
// first counterexample; the ctest registration marks the expectation.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tqm/budget.hpp"
#include "tqm/errors.hpp"
#include "tqm/evolve.hpp"
#include "tqm/gates.hpp"
#include "tqm/lattice.hpp"
#include "tqm/operators.hpp"
#include "tqm/rng.hpp"
#include "tqm/state.hpp"
#include "tqm/transfer.hpp"
#include "tqm/types.hpp"

using namespace tqm;

namespace {

constexpr double kGapTol = 1e-10;
constexpr double kStringTol = 1e-10;
constexpr double kSequenceTol = 1e-8;
constexpr double kSwapRoundTol = 1e-12;
constexpr double kSwapMapTol = 1e-14;
constexpr double kMirrorTol = 1e-9;
constexpr double kSpectrumTol = 1e-10;
constexpr double kPeakThreshold = 0.95;
constexpr double kMismatchThreshold = 0.94;
constexpr double kScanRelTol = 1e-6;
constexpr double kTraceTol = 1e-8;
constexpr double kHermTol = 1e-10;
constexpr double kHalvingTol = 1e-6;
constexpr double kFitR2Min = 0.99;

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

DecayRates headline_rates() { return {1.0, 1.0, 0.1, 0.1, 0.1}; }

// ---- 1: winding = 1 exactly inside |gamma_z| < 2 t_s on the survey grid ----
bool criterion_1(std::string& detail) {
  const double t0 = now_seconds();
  int wrong = 0, cells = 0;
  std::string first;
  for (int i = 0; i < 41; ++i) {
    const double gz = -3.0 + 6.0 * i / 40.0;
    for (int j = 0; j < 41; ++j) {
      const double tso = 0.1 + 2.0 * j / 40.0;
      lattice::LatticeParams p;
      p.gamma_z = gz;
      p.t_so = tso;
      const int expected = std::abs(gz) < 2.0 * p.t_s ? 1 : 0;
      int got = -99;
      try {
        got = lattice::winding_number(p, 1024);
      } catch (const GapClosedError&) {
      }
      ++cells;
      if (got != expected) {
        ++wrong;
        if (first.empty())
          first = " first mismatch at (gamma_z=" + fmt(gz) + ", t_so=" + fmt(tso) + ") got " +
                  std::to_string(got);
      }
    }
  }
  const double dt = now_seconds() - t0;
  detail = std::to_string(cells - wrong) + "/" + std::to_string(cells) +
           " grid cells match the |gamma_z| < 2 t_s rule" + first + "; " + fmt(dt) + " s";
  return wrong == 0 && dt < 10.0;
}

// ---- 2: closed-form gap vs dense scan over random draws (expected red) ----
bool criterion_2(std::string& detail) {
  CounterRng rng(42);
  int mismatches = 0;
  std::string first;
  for (int i = 0; i < 100; ++i) {
    lattice::LatticeParams p;
    p.t_so = 0.1 + 1.9 * rng.uniform(0, 2 * i);
    p.gamma_z = -2.0 + 4.0 * rng.uniform(0, 2 * i + 1);
    const auto check = lattice::bulk_gap_check(p, 8192, kGapTol);
    if (!check.agree) {
      ++mismatches;
      if (first.empty())
        first = " first counterexample (t_s=1, t_so=" + fmt(p.t_so) + ", gamma_z=" +
                fmt(p.gamma_z) + "): closed " + fmt(check.closed_form) + " vs scan " +
                fmt(check.scan);
    }
  }
  detail = std::to_string(100 - mismatches) + "/100 draws agree within 1e-10;" + first +
           "; the closed form overestimates when t_so < t_s and |gamma_z| < "
           "2 sqrt(t_s^2 - t_so^2): the band minimum then sits at interior k and equals "
           "t_so*sqrt(4 - gamma_z^2/(t_s^2 - t_so^2))";
  return mismatches == 0;
}

// ---- 3: splitting vs N is log-linear and monotone decreasing --------------
bool criterion_3(std::string& detail) {
  const double t0 = now_seconds();
  const std::vector<int> n_list = {8, 12, 16, 20, 24};
  std::vector<double> x, y;
  bool monotone = true;
  double prev = 1e300;
  for (int n : n_list) {
    lattice::LatticeParams p;
    p.n_sites = n;
    const auto pair = lattice::zero_modes(p);
    if (!(pair.splitting < prev)) monotone = false;
    prev = pair.splitting;
    x.push_back(n);
    y.push_back(std::log(pair.splitting));
  }
  const size_t m = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < m; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double cov = m * sxy - sx * sy;
  const double r2 = cov * cov / ((m * sxx - sx * sx) * (m * syy - sy * sy));
  const double slope = cov / (m * sxx - sx * sx);
  const double dt = now_seconds() - t0;
  detail = "log-splitting fit R^2 = " + fmt(r2) + ", slope " + fmt(slope) + " per site, " +
           (monotone ? "monotone" : "NOT monotone") + "; " + fmt(dt) + " s";
  return r2 > kFitR2Min && monotone && dt < 5.0;
}

// ---- 4: photon-number-conditioned string vs direct exponentiation ---------
bool criterion_4(std::string& detail) {
  gates::QndParams qnd;
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n) {
    gates::SelectionMask mask;
    mask.participating.assign(static_cast<size_t>(n), true);
    for (int n_c : {0, 1}) {
      const Matrix brute = gates::qnd_unitary_brute_force(qnd, mask, n_c);
      const Matrix closed = gates::qnd_unitary_closed_form(n, n_c);
      worst = std::max(worst, operator_norm(brute - closed));
    }
  }
  detail = "max operator-norm deviation over N in 1..6, both photon sectors: " + fmt(worst);
  return worst <= kStringTol;
}

// ---- 5: ancilla-conditioned string sequence vs its target -----------------
bool criterion_5(std::string& detail) {
  gates::QndParams qnd;
  gates::AncillaParams anc;
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n) {
    gates::SelectionMask mask;
    mask.participating.assign(static_cast<size_t>(n), true);
    const auto r = gates::ancilla_sequence(qnd, anc, mask);
    worst = std::max(worst, r.distance_to_target);
  }
  gates::SelectionMask mask3;
  mask3.participating.assign(3, true);
  const auto full_period = gates::ancilla_sequence(qnd, anc, mask3, 2.0, 0.0);
  detail = "max distance over N in 1..4 with the half-period swap: " + fmt(worst) +
           "; documented discrepancy: the full-period swap returns the excitation instead of "
           "transferring it, N = 3 distance " +
           fmt(full_period.distance_to_target) + " (= sqrt(2))";
  return worst <= kSequenceTol &&
         std::abs(full_period.distance_to_target - std::sqrt(2.0)) < 1e-6;
}

// ---- 6: memory swap roundtrip over seeded random states -------------------
bool criterion_6(std::string& detail) {
  CompositeSpace logical({{"logical", 2}});
  Vector plus(2), minus(2);
  plus << kInvSqrt2, kInvSqrt2;
  minus << kInvSqrt2, -kInvSqrt2;
  gates::LogicalTsq tsq{StateVector(logical, plus), StateVector(logical, minus)};
  const Matrix u_out = gates::swap_out_unitary(tsq);

  CounterRng rng(2026);
  double worst_round = 0.0, worst_map = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto q = rng.qubit(0, static_cast<std::uint64_t>(i));
    const StateVector written = gates::swap_in(q[0], q[1], tsq);
    Vector mapped(4);
    mapped << q[0], q[1], 0.0, 0.0;
    worst_map = std::max(worst_map, (written.amplitudes() - mapped).norm());
    Vector stored(4);
    stored << q[0], 0.0, q[1], 0.0;
    worst_round = std::max(worst_round, (u_out * written.amplitudes() - stored).norm());
  }
  detail = "100 seeded states: worst write-then-read deviation " + fmt(worst_round) +
           ", worst write mapping deviation " + fmt(worst_map);
  return worst_round <= kSwapRoundTol && worst_map <= kSwapMapTol;
}

// ---- 7: closed-system mirror at t = pi/g and the coupling spectrum --------
bool criterion_7(std::string& detail) {
  const double g = 6.0 * kPi;
  CounterRng rng(777);
  double worst_f = 1.0, worst_spec = 0.0;
  for (int k : {1, 2}) {
    const TransferParams p = resonance_coupling(k, g);
    for (int i = 0; i < 20; ++i) {
      const auto q = rng.qubit(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i));
      TransferScenario s;
      s.alpha = q[0];
      s.beta = q[1];
      worst_f = std::min(worst_f, unitary_transfer(p, s));
    }
    const Matrix block = single_excitation_block(build_transfer_hamiltonian(p));
    const SpectralPropagator prop(block);
    const double big = std::sqrt(g * g + 2.0 * p.g_big_1 * p.g_big_1);
    const std::vector<double> expected = {-big, -g, 0.0, g, big};
    for (int i = 0; i < 5; ++i)
      worst_spec = std::max(worst_spec, std::abs(prop.eigenvalues()(i) - expected[i]));
  }
  detail = "k = 1, 2 with 20 random inputs each: min fidelity at t = pi/g is " + fmt(worst_f) +
           "; max spectrum deviation from {0, +-g, +-sqrt(g^2+2G^2)}: " + fmt(worst_spec);
  return 1.0 - worst_f <= kMirrorTol && worst_spec <= kSpectrumTol;
}

// ---- 8: dissipative peak fidelity and coupling-mismatch robustness --------
bool criterion_8(std::string& detail) {
  const TransferParams p = resonance_coupling(1, 6.0 * kPi);
  const TransferScenario s;  // full mirror window, 600 samples

  double t0 = now_seconds();
  const TransferCurve curve = lindblad_transfer(p, headline_rates(), s);
  const double curve_seconds = now_seconds() - t0;

  t0 = now_seconds();
  const auto mm = mismatch_sweep(p, headline_rates(), s, {-0.1, 0.1});
  const double mm_seconds = 0.5 * (now_seconds() - t0);

  // Recorded alternative reading of the same printed numbers: decay rates
  // treated as ordinary frequencies (times 2*pi) with the coupling kept as
  // printed. It does not reproduce the high-fidelity peak, which is why the
  // consistent one-unit reading above is the documented convention.
  DecayRates mixed = headline_rates();
  mixed.kappa_a *= 2.0 * kPi;
  mixed.kappa_b *= 2.0 * kPi;
  mixed.kappa_d *= 2.0 * kPi;
  mixed.gamma_a *= 2.0 * kPi;
  mixed.gamma_s *= 2.0 * kPi;
  const TransferCurve alt = lindblad_transfer(p, mixed, s);

  detail = "consistent-units reading: peak F2 = " + fmt(curve.peak_f2) + " (" +
           fmt(curve_seconds) + " s/curve); -10%/+10% coupling mismatch peaks " +
           fmt(mm[0].peak_f2) + "/" + fmt(mm[1].peak_f2) +
           "; rates-scaled alternative reading peaks at " + fmt(alt.peak_f2) +
           " and does not reproduce";
  return curve.peak_f2 > kPeakThreshold && mm[0].peak_f2 > kMismatchThreshold &&
         mm[1].peak_f2 > kMismatchThreshold && curve_seconds < 60.0 && mm_seconds < 60.0;
}

// ---- 9: mechanical-decay infidelity shrinks at large coupling ratio -------
bool criterion_9(std::string& detail) {
  const auto study = large_r_study(6.0 * kPi, {1, 14}, headline_rates(), TransferScenario{});
  detail = "mechanical-decay infidelity gap: k=1 (r=" + fmt(study[0].r) + ") " +
           fmt(study[0].gap) + " vs k=14 (r=" + fmt(study[1].r) + ") " + fmt(study[1].gap);
  return study[1].gap < study[0].gap;
}

// ---- 10: fidelity budget arithmetic and the reported loss discrepancy -----
bool criterion_10(std::string& detail) {
  BudgetInputs in;
  in.delta = 10.0 * in.g;
  const auto loss = photon_loss(in);
  const double scan_rel = std::abs(loss.scan_min - loss.p_loss_min) / loss.p_loss_min;
  const auto rep = compose_budget(in, 0.95);

  bool note_present = false;
  for (const auto& n : rep.notes)
    note_present = note_present || (n.find("2*pi*sqrt(N/P)") != std::string::npos &&
                                    n.find("3%") != std::string::npos);

  const bool ok = rep.purcell_p == 4840.0 && scan_rel <= kScanRelTol && rep.f1 == 0.9025 &&
                  std::abs(rep.f_total - 0.857375) < 1e-14 && rep.shift_ratio == 0.005 &&
                  note_present;
  detail = "P = " + fmt(rep.purcell_p) + "; scan-vs-analytic loss minimum relative gap " +
           fmt(scan_rel) + "; F1 = " + fmt(rep.f1) + "; F = " + fmt(rep.f_total) +
           "; shift ratio = " + fmt(rep.shift_ratio) + "; loss-figure discrepancy note " +
           (note_present ? "present (reported, unresolved)" : "MISSING");
  return ok;
}

// ---- 11: integrator hygiene and byte-identical CLI reruns ------------------
bool criterion_11(std::string& detail) {
  const TransferParams p = resonance_coupling(1, 6.0 * kPi);
  const HermitianOperator h = build_transfer_hamiltonian(p);
  const CompositeSpace& space = h.space();
  const DecayRates d = headline_rates();

  std::vector<CollapseChannel> channels;
  auto add = [&](const char* name, double rate, const Matrix& op, const char* label) {
    channels.push_back({name, rate, embed(op, {label}, space)});
  };
  add("optical_loss", d.kappa_a, fock_lower(2), "optical");
  add("microwave_loss", d.kappa_b, fock_lower(2), "microwave");
  add("mechanical_loss", d.kappa_d, fock_lower(2), "mechanical");
  add("atom_decay", d.gamma_a, qubit_lower(), "atom");
  add("sc_decay", d.gamma_s, qubit_lower(), "sc_qubit");

  Vector psi0 = Vector::Zero(space.total_dim());
  psi0(0) = kInvSqrt2;
  psi0(space.stride(space.index_of("sc_qubit"))) = kInvSqrt2;
  const double t_final = 3.0 * kPi / p.g;

  const TransferCurve base = lindblad_transfer(p, d, TransferScenario{});
  const auto samples = evolve_lindblad(h, channels,
                                       DensityMatrix::from_pure(StateVector(space, psi0)),
                                       t_final, base.dt, 600);
  double worst_trace = 0.0, worst_herm = 0.0;
  for (const auto& s : samples) {
    const Matrix& rho = s.state.matrix();
    worst_trace = std::max(worst_trace, std::abs(rho.trace().real() - 1.0));
    worst_herm = std::max(worst_herm, operator_norm(rho - rho.adjoint()));
  }

  const TransferCurve half = lindblad_transfer(p, d, TransferScenario{}, base.dt / 2.0);
  const double halving = std::abs(half.peak_f2 - base.peak_f2);

  namespace fs = std::filesystem;
  auto slurp = [](const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const fs::path scratch = "acceptance_scratch";
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  std::ofstream(scratch / "cfg.json")
      << R"({"t_final":0.1,"n_samples":40,"compare_rates_scaled_reading":false})";
  const std::string base_cmd = std::string(TQMSIM_BIN) + " transfer --config " +
                               (scratch / "cfg.json").string() + " --seed 11 --out ";
  bool cli_ok = true;
  for (const char* run : {"a", "b"}) {
    const int rc = std::system((base_cmd + (scratch / run).string()).c_str());
    cli_ok = cli_ok && rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
  }
  const bool identical =
      cli_ok &&
      slurp(scratch / "a" / "transfer_curve.csv") == slurp(scratch / "b" / "transfer_curve.csv") &&
      slurp(scratch / "a" / "transfer_summary.json") ==
          slurp(scratch / "b" / "transfer_summary.json") &&
      slurp(scratch / "a" / "manifest.json") == slurp(scratch / "b" / "manifest.json");

  detail = "trace drift " + fmt(worst_trace) + ", hermiticity drift " + fmt(worst_herm) +
           ", dt-halving peak shift " + fmt(halving) + ", CLI reruns " +
           (identical ? "byte-identical" : "DIFFER");
  return worst_trace <= kTraceTol && worst_herm <= kHermTol && halving < kHalvingTol && identical;
}

struct Criterion {
  int id;
  const char* name;
  bool (*fn)(std::string&);
};

constexpr Criterion kCriteria[] = {
    {1, "topological phase boundary on the survey grid", criterion_1},
    {2, "closed-form gap vs dense band minimum", criterion_2},
    {3, "exponential end-mode protection", criterion_3},
    {4, "photon-conditioned string closed form", criterion_4},
    {5, "ancilla-conditioned string sequence", criterion_5},
    {6, "memory write/read roundtrip", criterion_6},
    {7, "closed-system transfer mirror and spectrum", criterion_7},
    {8, "dissipative transfer peak and mismatch robustness", criterion_8},
    {9, "mechanical-decay suppression at large coupling ratio", criterion_9},
    {10, "fidelity budget arithmetic", criterion_10},
    {11, "numerical hygiene and deterministic reruns", criterion_11},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  int failures = 0;
  for (const auto& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    std::string detail;
    bool pass = false;
    try {
      pass = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    failures += pass ? 0 : 1;
    std::printf("criterion %2d: %s  %s [%s]\n", c.id, pass ? "PASS" : "FAIL", c.name,
                detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
