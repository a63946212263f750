#pragma once

#include "tqm/space.hpp"
#include "tqm/types.hpp"

namespace tqm {

// Normalized pure state over a CompositeSpace.
class StateVector {
 public:
  StateVector() = default;
  // Validates ||amplitudes|| = 1 within 1e-12.
  StateVector(CompositeSpace space, Vector amplitudes);

  // Scales the input to unit norm first (throws only on a zero vector).
  static StateVector normalized(CompositeSpace space, Vector amplitudes);
  // Computational basis state |digits...>.
  static StateVector basis(CompositeSpace space, std::span<const int> digits);

  const CompositeSpace& space() const { return space_; }
  const Vector& amplitudes() const { return amp_; }
  int dim() const { return static_cast<int>(amp_.size()); }

 private:
  CompositeSpace space_;
  Vector amp_;
};

// Density matrix: Hermitian (1e-12), unit trace (1e-10), positive
// semidefinite up to -1e-8 on the smallest eigenvalue.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(CompositeSpace space, Matrix rho);

  static DensityMatrix from_pure(const StateVector& psi);

  const CompositeSpace& space() const { return space_; }
  const Matrix& matrix() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }

  double purity() const;  // tr(rho^2), real by construction

 private:
  CompositeSpace space_;
  Matrix rho_;
};

}  // namespace tqm
