#pragma once

#include <string>
#include <vector>

#include "tqm/space.hpp"
#include "tqm/state.hpp"
#include "tqm/types.hpp"

namespace tqm {

// Hermitian observable / Hamiltonian attached to a space.
// Construction validates H = H^dag within 1e-12 relative to max |entry|.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  HermitianOperator(CompositeSpace space, Matrix m);

  const CompositeSpace& space() const { return space_; }
  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  CompositeSpace space_;
  Matrix m_;
};

// Lindblad channel: rate >= 0 and the bare (unscaled) collapse operator L.
// Rate convention: each channel contributes
//   rate * (2 L rho L^dag - L^dag L rho - rho L^dag L)
// to drho/dt, so a lone decay channel empties its population as exp(-2*rate*t).
struct CollapseChannel {
  std::string name;
  double rate = 0.0;
  Matrix op;
};

// Lift `op`, defined on the listed target subsystems (in the given order,
// first target = most significant digit of op's index), to the full space.
Matrix embed(const Matrix& op, const std::vector<std::string>& targets, const CompositeSpace& space);

// Trace out everything not named in `keep`. Kept subsystems retain their
// original relative order regardless of the order given here.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);

// <target|rho|target>; imaginary part must vanish within 1e-12.
double fidelity_pure(const StateVector& target, const DensityMatrix& rho);
double fidelity_pure(const StateVector& target, const StateVector& psi);  // |<target|psi>|^2

double operator_norm(const Matrix& m);       // largest singular value
double hermiticity_error(const Matrix& m);   // max |m - m^dag| entry

// Single-qubit constants and small builders.
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix identity(int dim);
Matrix qubit_lower();              // |0><1|
Matrix fock_lower(int dim);        // a with a|n> = sqrt(n)|n-1>
Matrix number_operator(int dim);   // a^dag a

}  // namespace tqm
