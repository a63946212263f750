#pragma once

#include <array>
#include <optional>
#include <vector>

#include "tqm/operators.hpp"
#include "tqm/state.hpp"
#include "tqm/types.hpp"

namespace tqm::lattice {

enum class Boundary { open, periodic };

// Chain units: lattice constant = 1, hbar = 1, energies in units of t_s's
// scale. Single-particle basis over N sites is {site (x) spin}, site-major,
// spin up = digit 0.
struct LatticeParams {
  double t_s = 1.0;
  double t_so = 0.5;
  double gamma_z = 0.0;
  int n_sites = 40;
  Boundary boundary = Boundary::open;

  void validate() const;
};

struct BlochVector {
  double k = 0.0;
  double d_y = 0.0;
  double d_z = 0.0;
  double norm() const;
};

enum class DomainAxis { y, z };

// Local Zeeman field of amplitude gamma_0 on the inclusive site window
// [x1, x2]; strong enough fields cut the chain into a mass domain with a
// bound state at each wall.
struct DomainField {
  double gamma_0 = 2.0;
  DomainAxis axis = DomainAxis::y;
  int x1 = 0;
  int x2 = 0;
};

// Low-energy two-level subspace. `states` are the position-resolved
// combinations within the near-degenerate span (left first), so each is
// exponentially localized even when the raw eigenvectors hybridize across
// the chain. `energies` are the exact eigenvalues for zero_modes and
// Rayleigh quotients of the returned states for midgap_states.
struct MidgapPair {
  std::array<double, 2> energies{};
  std::array<StateVector, 2> states;
  double splitting = 0.0;
  std::array<double, 2> localization_lengths{};
};

BlochVector bloch_vector(double k, const LatticeParams& params);

// Accumulated angle of (d_y, d_z) over the Brillouin zone divided by 2*pi.
// Throws GapClosedError when min_k |d| < 1e-9 * t_s.
int winding_number(const LatticeParams& params, int n_k = 1024);

// Closed-form gap min{|2 t_s - |gamma_z||, 2 |t_so|}. See bulk_gap_check for
// the dense-grid cross-check; the closed form is NOT the band minimum
// everywhere (details in bulk_gap_check's doc).
double bulk_gap(const LatticeParams& params);

// min over a dense k-grid of |(d_y, d_z)| (band energy closest to zero).
double band_minimum_scan(const LatticeParams& params, int n_k = 8192);

// Comparison of the closed form against the grid scan. The two agree when
// the band minimum sits at k in {0, pi, +-pi/2}, which covers gamma_z = 0,
// t_so >= t_s, and |gamma_z| >= 2(t_s^2 - t_so^2)/t_s. In the remaining
// wedge (t_so < t_s, small nonzero gamma_z) the true minimum lies at an
// interior k and equals t_so * sqrt(4 - gamma_z^2/(t_s^2 - t_so^2)), which
// the closed form overestimates; `agree` reports the 1e-10 comparison
// instead of asserting it.
struct GapCheck {
  double closed_form = 0.0;
  double scan = 0.0;
  double abs_diff = 0.0;
  bool agree = false;
};
GapCheck bulk_gap_check(const LatticeParams& params, int n_k = 8192, double tol = 1e-10);

// 2N x 2N single-particle Hamiltonian. Requires open boundary when a domain
// field is present; N > 10^4 is rejected.
HermitianOperator build_open_chain(const LatticeParams& params,
                                   const std::optional<DomainField>& domain = std::nullopt);

// End-localized pair of a topological open chain. Throws NotTopologicalError
// when the winding vanishes, std::invalid_argument for periodic boundary.
MidgapPair zero_modes(const LatticeParams& params);

// Domain-wall pair near x1/x2. Requires |gamma_0| > 2|t_so| (else
// DomainTooWeakError). Wall states are picked from all inside-gap states by
// position, so chain-end zero modes (present when the surrounding chain is
// topological) are not mistaken for wall states.
MidgapPair midgap_states(const LatticeParams& params, const DomainField& domain);

struct RampPoint {
  double t = 0.0;
  double gamma_0 = 0.0;
};

struct BlochSample {
  double t = 0.0;
  double gamma_0 = 0.0;
  double bx = 0.0, by = 0.0, bz = 0.0;
  double leakage = 0.0;    // population outside the instantaneous pair
  double splitting = 0.0;  // instantaneous pair splitting
};

// Evolves |psi_+> under the chain Hamiltonian with gamma_0 following the
// piecewise-linear ramp; each step uses the midpoint field. At each of the
// n_samples uniform times the state is projected onto the instantaneous
// midgap pair (gauge-fixed against the previous sample) and reported as a
// Bloch vector. LeakageExceededError above leakage_limit.
std::vector<BlochSample> tsq_rotation(const LatticeParams& params, const DomainField& domain,
                                      const std::vector<RampPoint>& ramp, double dt,
                                      int n_samples = 0, double leakage_limit = 0.05);

}  // namespace tqm::lattice
