#include "tqm/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace tqm::kernels {

void matmul(const Matrix& a, const Matrix& b, Matrix& c, Exec exec) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions do not match");
  c.resize(a.rows(), b.cols());
  c.setZero();
  const Eigen::Index rows = a.rows();
  const Eigen::Index inner = a.cols();
  const Eigen::Index cols = b.cols();
  const cxd* ap = a.data();
  const cxd* bp = b.data();
  cxd* cp = c.data();
  // Column-major axpy order: for each output column j, sweep a's columns.
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (Eigen::Index j = 0; j < cols; ++j) {
    cxd* cj = cp + j * rows;
    for (Eigen::Index k = 0; k < inner; ++k) {
      const cxd bkj = bp[k + j * inner];
      const cxd* ak = ap + k * rows;
      for (Eigen::Index i = 0; i < rows; ++i) cj[i] += ak[i] * bkj;
    }
  }
}

MasterEqTerms make_master_terms(const Matrix& hamiltonian, const std::vector<CollapseChannel>& channels) {
  const Eigen::Index d = hamiltonian.rows();
  MasterEqTerms terms;
  terms.drift = -kI * hamiltonian;
  for (const auto& ch : channels) {
    if (ch.rate < 0.0) throw std::invalid_argument("make_master_terms: negative rate for channel '" + ch.name + "'");
    if (ch.op.rows() != d || ch.op.cols() != d) throw std::invalid_argument("make_master_terms: channel '" + ch.name + "' dimension mismatch");
    if (ch.rate == 0.0) continue;
    Matrix scaled = std::sqrt(2.0 * ch.rate) * ch.op;
    terms.drift -= 0.5 * (scaled.adjoint() * scaled);
    terms.jumps.push_back(std::move(scaled));
  }
  return terms;
}

void RhsWorkspace::resize(int dim) {
  t1.resize(dim, dim);
  t2.resize(dim, dim);
}

void master_rhs(const MasterEqTerms& terms, const Matrix& rho, Matrix& out, RhsWorkspace& ws, Exec exec) {
  const Eigen::Index d = rho.rows();
  matmul(terms.drift, rho, ws.t1, exec);
  out.resize(d, d);
  cxd* op = out.data();
  const cxd* t1p = ws.t1.data();
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      op[i + j * d] = t1p[i + j * d] + std::conj(t1p[j + i * d]);
    }
  }
  for (const auto& jump : terms.jumps) {
    matmul(jump, rho, ws.t2, exec);
    const cxd* t2p = ws.t2.data();
    const cxd* lp = jump.data();
    // out += t2 * jump^dag, accumulated per output column.
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (Eigen::Index j = 0; j < d; ++j) {
      cxd* oj = op + j * d;
      for (Eigen::Index k = 0; k < d; ++k) {
        const cxd ljk = std::conj(lp[j + k * d]);
        const cxd* tk = t2p + k * d;
        for (Eigen::Index i = 0; i < d; ++i) oj[i] += tk[i] * ljk;
      }
    }
  }
}

void master_rhs_reference(const Matrix& hamiltonian, const std::vector<CollapseChannel>& channels,
                          const Matrix& rho, Matrix& out) {
  out = -kI * (hamiltonian * rho - rho * hamiltonian);
  for (const auto& ch : channels) {
    if (ch.rate == 0.0) continue;
    const Matrix ldl = ch.op.adjoint() * ch.op;
    out += ch.rate * (2.0 * ch.op * rho * ch.op.adjoint() - ldl * rho - rho * ldl);
  }
}

}  // namespace tqm::kernels
