#pragma once

#include <vector>

#include "tqm/operators.hpp"
#include "tqm/space.hpp"
#include "tqm/types.hpp"

namespace tqm {

// Couplings of the five-site excitation-exchange chain
//   sc_qubit -g- microwave -G2- mechanical -G1- optical -g- atom.
// Both qubit-cavity couplings are modulated to the same g; the two
// beam-splitter couplings are independent so mismatch can be injected.
// Angular-frequency units throughout, times in the inverse unit.
struct TransferParams {
  double g = 2.0 * kPi;  // qubit-cavity exchange coupling, both ends
  double g_big_1 = 0.0;  // mechanical-optical coupling
  double g_big_2 = 0.0;  // mechanical-microwave coupling
  int k_order = 0;       // > 0 only when built by resonance_coupling

  // G/g for the symmetric case; requires g_big_1 == g_big_2.
  double r() const;
  void validate() const;
};

// Mirror-symmetric couplings with G = g*sqrt((4k^2 - 1)/2). The chain's
// single-excitation eigenvalues are then {0, +-g, +-2kg}: at t = pi/g every
// phase factor returns to the common value -1 on the odd-parity modes, which
// is exactly the condition for the chain to act as a perfect state mirror.
TransferParams resonance_coupling(int k_order, double g);

struct DecayRates {
  double kappa_a = 0.0;  // optical cavity
  double kappa_b = 0.0;  // microwave cavity
  double kappa_d = 0.0;  // mechanical mode
  double gamma_a = 0.0;  // atomic qubit
  double gamma_s = 0.0;  // superconducting qubit
  void validate() const;
  double total() const { return kappa_a + kappa_b + kappa_d + gamma_a + gamma_s; }
};

// Initial superconducting-qubit state alpha|0> + beta|1> and the sampling
// window for fidelity curves. t_final <= 0 selects three half-periods 3pi/g.
struct TransferScenario {
  cxd alpha = kInvSqrt2;
  cxd beta = kInvSqrt2;
  double t_final = 0.0;
  int n_samples = 600;
  void validate() const;
};

// Five labeled two-level subsystems, ordered
// [sc_qubit, microwave, mechanical, optical, atom]; the bosonic modes are
// Fock-truncated at one quantum, which is exact here because the initial
// state carries at most one excitation and every term conserves or lowers it.
CompositeSpace build_transfer_space();

// H = g(a^dag s_a^- + h.c.) + g(b^dag s_s^- + h.c.)
//   + G1(d a^dag + h.c.) + G2(d b^dag + h.c.)
// on the truncated space. Commutes with the total excitation number.
HermitianOperator build_transfer_hamiltonian(const TransferParams& p);

// Sum of number operators over all five subsystems.
Matrix excitation_number(const CompositeSpace& space);

// 5x5 restriction of H to the single-excitation sector, basis ordered as the
// subsystem list (excitation on sc_qubit first).
Matrix single_excitation_block(const HermitianOperator& h);

// Closed-system evolution to t = pi/g; returns the fidelity of the atom's
// reduced state against alpha|0> + beta|1>.
double unitary_transfer(const TransferParams& p, const TransferScenario& s);

struct TransferCurvePoint {
  double t = 0.0;
  double f2 = 0.0;         // <psi_a| tr_others rho |psi_a>
  double excitation = 0.0; // tr(rho N), non-increasing under pure decay
};

struct TransferCurve {
  std::vector<TransferCurvePoint> points;
  double peak_f2 = 0.0;
  double peak_time = 0.0;
  double dt = 0.0;  // step actually used (after auto selection)
};

// Master-equation fidelity curve with decay on every subsystem. dt <= 0 picks
// 0.02 / (sqrt(g^2 + 2 G^2) + total rate). Throws TraceDriftError on
// integrator drift and std::logic_error if the excitation expectation grows
// between samples by more than 1e-9 (it cannot, all channels lower it).
TransferCurve lindblad_transfer(const TransferParams& p, const DecayRates& d,
                                const TransferScenario& s, double dt = 0.0);

struct MismatchPoint {
  double fraction = 0.0;
  double peak_f2 = 0.0;
};

// Peak fidelity with both beam-splitter couplings scaled by (1 + fraction).
// Fractions must lie within [-0.5, 0.5].
std::vector<MismatchPoint> mismatch_sweep(const TransferParams& p, const DecayRates& d,
                                          const TransferScenario& s,
                                          const std::vector<double>& fractions, double dt = 0.0);

struct LargeRPoint {
  int k_order = 0;
  double r = 0.0;
  double peak_f2 = 0.0;               // with the given mechanical decay
  double peak_f2_no_mech_decay = 0.0; // same run with kappa_d = 0
  double gap = 0.0;                   // mechanical-decay-induced infidelity
};

// Paired runs (kappa_d as given vs zero) per resonance order. The gap is
// clamped-checked nonnegative: turning on a decay channel cannot raise the
// peak fidelity of this scenario.
std::vector<LargeRPoint> large_r_study(double g, const std::vector<int>& k_list,
                                       const DecayRates& d, const TransferScenario& s,
                                       double dt = 0.0);

}  // namespace tqm
