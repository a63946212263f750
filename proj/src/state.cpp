#include "tqm/state.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace tqm {

StateVector::StateVector(CompositeSpace space, Vector amplitudes)
    : space_(std::move(space)), amp_(std::move(amplitudes)) {
  if (amp_.size() != space_.total_dim()) throw std::invalid_argument("StateVector: amplitude count does not match space dimension");
  const double n = amp_.norm();
  if (std::abs(n - 1.0) > 1e-12) throw std::invalid_argument("StateVector: not normalized (|norm-1| = " + std::to_string(std::abs(n - 1.0)) + ")");
}

StateVector StateVector::normalized(CompositeSpace space, Vector amplitudes) {
  const double n = amplitudes.norm();
  if (n == 0.0) throw std::invalid_argument("StateVector: cannot normalize the zero vector");
  return StateVector(std::move(space), amplitudes / n);
}

StateVector StateVector::basis(CompositeSpace space, std::span<const int> digits) {
  Vector v = Vector::Zero(space.total_dim());
  v(space.compose(digits)) = 1.0;
  return StateVector(std::move(space), std::move(v));
}

DensityMatrix::DensityMatrix(CompositeSpace space, Matrix rho)
    : space_(std::move(space)), rho_(std::move(rho)) {
  const int d = space_.total_dim();
  if (rho_.rows() != d || rho_.cols() != d) throw std::invalid_argument("DensityMatrix: shape does not match space dimension");
  const double scale = std::max(1.0, rho_.cwiseAbs().maxCoeff());
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (!(herm <= 1e-12 * scale)) throw std::invalid_argument("DensityMatrix: not Hermitian (deviation " + std::to_string(herm) + ")");
  const double tr_err = std::abs(rho_.trace().real() - 1.0) + std::abs(rho_.trace().imag());
  if (!(tr_err <= 1e-10)) throw std::invalid_argument("DensityMatrix: trace deviates from 1 by " + std::to_string(tr_err));
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
  const double min_ev = es.eigenvalues().minCoeff();
  if (!(min_ev >= -1e-8)) throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(min_ev));
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  DensityMatrix rho;
  rho.space_ = psi.space();
  rho.rho_ = psi.amplitudes() * psi.amplitudes().adjoint();
  return rho;
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

}  // namespace tqm
