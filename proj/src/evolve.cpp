#include "tqm/evolve.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "tqm/errors.hpp"

namespace tqm {

SpectralPropagator::SpectralPropagator(const Matrix& hamiltonian) {
  if (hamiltonian.rows() != hamiltonian.cols()) throw std::invalid_argument("SpectralPropagator: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian);
  if (es.info() != Eigen::Success) throw std::runtime_error("SpectralPropagator: eigendecomposition failed");
  evecs_ = es.eigenvectors();
  evals_ = es.eigenvalues();
}

Vector SpectralPropagator::advance(const Vector& psi, double t) const {
  Vector coeffs = evecs_.adjoint() * psi;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    coeffs(i) *= std::polar(1.0, -evals_(i) * t);
  }
  return evecs_ * coeffs;
}

Matrix SpectralPropagator::unitary(double t) const {
  Vector phases(evals_.size());
  for (Eigen::Index i = 0; i < evals_.size(); ++i) phases(i) = std::polar(1.0, -evals_(i) * t);
  return evecs_ * phases.asDiagonal() * evecs_.adjoint();
}

StateVector evolve_unitary(const HermitianOperator& hamiltonian, const StateVector& psi0, double t) {
  if (!(hamiltonian.space() == psi0.space())) throw std::invalid_argument("evolve_unitary: mismatched spaces");
  SpectralPropagator prop(hamiltonian.matrix());
  return StateVector(psi0.space(), prop.advance(psi0.amplitudes(), t));
}

namespace {

void rk4_step(const kernels::MasterEqTerms& terms, Matrix& rho, double h,
              kernels::RhsWorkspace& ws, kernels::Exec exec,
              Matrix& k1, Matrix& k2, Matrix& k3, Matrix& k4, Matrix& stage) {
  kernels::master_rhs(terms, rho, k1, ws, exec);
  stage = rho + (0.5 * h) * k1;
  kernels::master_rhs(terms, stage, k2, ws, exec);
  stage = rho + (0.5 * h) * k2;
  kernels::master_rhs(terms, stage, k3, ws, exec);
  stage = rho + h * k3;
  kernels::master_rhs(terms, stage, k4, ws, exec);
  rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

std::vector<TrajectorySample> evolve_lindblad(const HermitianOperator& hamiltonian,
                                              const std::vector<CollapseChannel>& channels,
                                              const DensityMatrix& rho0, double t_final, double dt,
                                              int n_samples, const LindbladOptions& opts) {
  if (!(hamiltonian.space() == rho0.space())) throw std::invalid_argument("evolve_lindblad: mismatched spaces");
  if (t_final < 0.0) throw std::invalid_argument("evolve_lindblad: t_final must be >= 0");
  if (dt <= 0.0) throw std::invalid_argument("evolve_lindblad: dt must be > 0");

  const int dim = rho0.dim();
  auto terms = kernels::make_master_terms(hamiltonian.matrix(), channels);
  kernels::RhsWorkspace ws;
  ws.resize(dim);
  Matrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), stage(dim, dim);

  if (n_samples <= 0) n_samples = static_cast<int>(std::ceil(t_final / dt)) + 1;
  if (n_samples < 2) n_samples = 2;

  std::vector<TrajectorySample> out;
  out.reserve(static_cast<size_t>(n_samples));

  Matrix rho = rho0.matrix();
  auto record = [&](double t) {
    const double tr_err = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
    // Negated form so a NaN trace also lands here instead of slipping through.
    if (!(tr_err <= opts.trace_tol)) throw TraceDriftError("evolve_lindblad: trace drift " + std::to_string(tr_err) + " at t = " + std::to_string(t));
    TrajectorySample s;
    s.t = t;
    s.state = DensityMatrix(rho0.space(), rho);
    out.push_back(std::move(s));
  };

  record(0.0);
  for (int s = 1; s < n_samples; ++s) {
    const double t0 = t_final * (s - 1) / (n_samples - 1);
    const double t1 = t_final * s / (n_samples - 1);
    const double interval = t1 - t0;
    const int substeps = std::max(1, static_cast<int>(std::ceil(interval / dt - 1e-12)));
    const double h = interval / substeps;
    for (int i = 0; i < substeps; ++i) rk4_step(terms, rho, h, ws, opts.exec, k1, k2, k3, k4, stage);
    record(t1);
  }
  return out;
}

}  // namespace tqm
