#pragma once

#include <vector>

#include "tqm/kernels.hpp"
#include "tqm/operators.hpp"
#include "tqm/state.hpp"
#include "tqm/types.hpp"

namespace tqm {

// exp(-iHt) via one eigendecomposition, reusable for many times t.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const Matrix& hamiltonian);

  Vector advance(const Vector& psi, double t) const;
  Matrix unitary(double t) const;
  const RealVector& eigenvalues() const { return evals_; }

 private:
  Matrix evecs_;
  RealVector evals_;
};

StateVector evolve_unitary(const HermitianOperator& hamiltonian, const StateVector& psi0, double t);

struct TrajectorySample {
  double t = 0.0;
  DensityMatrix state;
};

struct LindbladOptions {
  kernels::Exec exec = kernels::Exec::parallel;
  double trace_tol = 1e-6;  // drift beyond this throws TraceDriftError
};

// Fixed-step RK4 integration of the master equation (rate convention in
// kernels.hpp). Returns n_samples states at uniform times over [0, t_final],
// endpoints included; each sampling interval is cut into ceil(interval/dt)
// equal substeps so sample times are hit exactly. n_samples <= 0 samples
// every step.
std::vector<TrajectorySample> evolve_lindblad(const HermitianOperator& hamiltonian,
                                              const std::vector<CollapseChannel>& channels,
                                              const DensityMatrix& rho0, double t_final, double dt,
                                              int n_samples = 0, const LindbladOptions& opts = {});

}  // namespace tqm
