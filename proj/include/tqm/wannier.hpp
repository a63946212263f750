#pragma once

namespace tqm::wannier {

// Microscopic inputs for the optical-lattice orbital integrals. Units are
// hbar = 1 throughout: energies in inverse time, k0 in inverse length,
// mass in time / length^2.
struct WannierInputs {
  double v0 = 10.0;               // lattice depth of V(x) = -v0 cos^2(2 k0 x)
  double k0 = 1.0;                // laser wavevector
  double mass = 1.0;
  double omega_rabi = 0.0;        // Raman coupling amplitude
  double delta_one_photon = 1.0;  // one-photon detuning

  // v0, k0, mass > 0 and |delta| >= 5 |omega_rabi|
  void validate() const;
};

struct HoppingIntegrals {
  double t_s;                // same-spin tunneling, > 0 in the band convention
  double t_so;               // bare spin-flip tunneling (omega_rabi^2 / delta) x overlap
  double lattice_constant;   // pi / (2 k0)
  double trap_frequency;     // sqrt(8 v0 k0^2 / mass), harmonic expansion of a well
  double recoil_energy;      // k0^2 / (2 mass)
  bool detuning_marginal;    // |delta| < 10 |omega_rabi|: adiabatic elimination is shaky
};

// Approximates the site orbital by the Gaussian ground state of the
// harmonically expanded well and evaluates the neighbor tunneling matrix
// elements by adaptive quadrature (relative tolerance 1e-8). The returned
// t_s carries the band sign convention: the matrix element itself is
// negative for these node-free orbitals, and t_s is its magnitude so that
// the chain Hamiltonian's -t_s convention applies directly.
HoppingIntegrals hopping_integrals(const WannierInputs& inputs);

// Overlap integral of sin(2 k0 x) between the orbital pair translated
// rigidly by shift: int dx phi(x - shift) sin(2 k0 x) phi(x - shift - a).
// Shifting by one lattice constant lands on the next bond, where the sine
// factor has the opposite sign.
double so_overlap_integral(const WannierInputs& inputs, double shift);

}  // namespace tqm::wannier
