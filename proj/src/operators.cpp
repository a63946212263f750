#include "tqm/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include <Eigen/SVD>

namespace tqm {

HermitianOperator::HermitianOperator(CompositeSpace space, Matrix m)
    : space_(std::move(space)), m_(std::move(m)) {
  const int d = space_.total_dim();
  if (m_.rows() != d || m_.cols() != d) throw std::invalid_argument("HermitianOperator: shape does not match space dimension");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double herm = hermiticity_error(m_);
  if (herm > 1e-12 * scale) throw std::invalid_argument("HermitianOperator: not Hermitian (deviation " + std::to_string(herm) + ")");
}

Matrix embed(const Matrix& op, const std::vector<std::string>& targets, const CompositeSpace& space) {
  if (targets.empty()) throw std::invalid_argument("embed: no target subsystems");
  if (op.rows() != op.cols()) throw std::invalid_argument("embed: operator must be square");
  std::unordered_set<std::string> seen;
  for (const auto& t : targets) {
    if (!seen.insert(t).second) throw std::invalid_argument("embed: duplicate target '" + t + "'");
  }

  const int nt = static_cast<int>(targets.size());
  std::vector<int> tpos(targets.size());
  std::vector<int> tdim(targets.size());
  long long op_dim = 1;
  for (int t = 0; t < nt; ++t) {
    tpos[static_cast<size_t>(t)] = space.index_of(targets[static_cast<size_t>(t)]);
    tdim[static_cast<size_t>(t)] = space.at(tpos[static_cast<size_t>(t)]).dim;
    op_dim *= tdim[static_cast<size_t>(t)];
  }
  if (op.rows() != op_dim) throw std::invalid_argument("embed: operator dimension does not match the product of target dimensions");

  // Strides of each target digit inside the operator's own flat index
  // (first listed target most significant, same convention as CompositeSpace).
  std::vector<int> op_stride(targets.size(), 1);
  for (int t = nt - 2; t >= 0; --t) {
    op_stride[static_cast<size_t>(t)] = op_stride[static_cast<size_t>(t) + 1] * tdim[static_cast<size_t>(t) + 1];
  }

  const int d_full = space.total_dim();
  const int d_op = static_cast<int>(op_dim);
  Matrix out = Matrix::Zero(d_full, d_full);
  std::vector<int> digits(static_cast<size_t>(space.count()));
  for (int row = 0; row < d_full; ++row) {
    space.decompose(row, digits);
    int op_row = 0;
    int base = row;
    for (int t = 0; t < nt; ++t) {
      const int pos = tpos[static_cast<size_t>(t)];
      op_row += digits[static_cast<size_t>(pos)] * op_stride[static_cast<size_t>(t)];
      base -= digits[static_cast<size_t>(pos)] * space.stride(pos);
    }
    for (int op_col = 0; op_col < d_op; ++op_col) {
      const cxd v = op(op_row, op_col);
      if (v == cxd{0.0, 0.0}) continue;
      int col = base;
      int rem = op_col;
      for (int t = 0; t < nt; ++t) {
        const int st = op_stride[static_cast<size_t>(t)];
        col += (rem / st) * space.stride(tpos[static_cast<size_t>(t)]);
        rem %= st;
      }
      out(row, col) = v;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
  const CompositeSpace& space = rho.space();
  if (keep.empty()) throw std::invalid_argument("partial_trace: must keep at least one subsystem");
  std::unordered_set<std::string> keep_set;
  for (const auto& k : keep) {
    space.index_of(k);  // validates the label
    if (!keep_set.insert(k).second) throw std::invalid_argument("partial_trace: duplicate label '" + k + "'");
  }

  std::vector<Subsystem> kept_subs;
  std::vector<int> kept_pos;
  std::vector<int> traced_pos;
  for (int i = 0; i < space.count(); ++i) {
    if (keep_set.count(space.at(i).label)) {
      kept_subs.push_back(space.at(i));
      kept_pos.push_back(i);
    } else {
      traced_pos.push_back(i);
    }
  }
  CompositeSpace out_space(kept_subs);
  const int dk = out_space.total_dim();

  long long dt = 1;
  for (int p : traced_pos) dt *= space.at(p).dim;

  Matrix out = Matrix::Zero(dk, dk);
  std::vector<int> kd_r(kept_pos.size());
  std::vector<int> kd_c(kept_pos.size());
  std::vector<int> td(traced_pos.size());
  for (int r = 0; r < dk; ++r) {
    out_space.decompose(r, kd_r);
    for (int c = 0; c < dk; ++c) {
      out_space.decompose(c, kd_c);
      cxd acc{0.0, 0.0};
      for (long long t = 0; t < dt; ++t) {
        long long rem = t;
        int row = 0;
        int col = 0;
        for (size_t i = traced_pos.size(); i-- > 0;) {
          const int pos = traced_pos[i];
          const int digit = static_cast<int>(rem % space.at(pos).dim);
          rem /= space.at(pos).dim;
          row += digit * space.stride(pos);
          col += digit * space.stride(pos);
        }
        for (size_t i = 0; i < kept_pos.size(); ++i) {
          row += kd_r[i] * space.stride(kept_pos[i]);
          col += kd_c[i] * space.stride(kept_pos[i]);
        }
        acc += rho.matrix()(row, col);
      }
      out(r, c) = acc;
    }
  }
  return DensityMatrix(out_space, std::move(out));
}

double fidelity_pure(const StateVector& target, const DensityMatrix& rho) {
  if (!(target.space() == rho.space())) throw std::invalid_argument("fidelity_pure: mismatched spaces");
  const cxd val = (target.amplitudes().adjoint() * rho.matrix() * target.amplitudes())(0);
  if (std::abs(val.imag()) > 1e-12) throw std::invalid_argument("fidelity_pure: expectation has imaginary part " + std::to_string(val.imag()));
  return std::clamp(val.real(), 0.0, 1.0);
}

double fidelity_pure(const StateVector& target, const StateVector& psi) {
  if (!(target.space() == psi.space())) throw std::invalid_argument("fidelity_pure: mismatched spaces");
  return std::norm(target.amplitudes().dot(psi.amplitudes()));
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double hermiticity_error(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << cxd{0, 0}, cxd{0, -1}, cxd{0, 1}, cxd{0, 0};
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

Matrix qubit_lower() { return fock_lower(2); }

Matrix fock_lower(int dim) {
  if (dim < 2) throw std::invalid_argument("fock_lower: dimension must be >= 2");
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return m;
}

Matrix number_operator(int dim) {
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) m(n, n) = static_cast<double>(n);
  return m;
}

}  // namespace tqm
