#pragma once

#include <vector>

#include "tqm/operators.hpp"
#include "tqm/types.hpp"

namespace tqm::kernels {

enum class Exec { serial, parallel };

// Hand-rolled complex GEMM, C = A*B. The OpenMP variant splits the output
// columns across threads; every element accumulates in the same k-order as
// the serial path, so results are bit-identical for any thread count.
void matmul(const Matrix& a, const Matrix& b, Matrix& c, Exec exec);

// Master-equation generator, precomputed once per evolution:
//   drho/dt = A rho + (A rho)^dag + sum_c Lc rho Lc^dag
// with Lc = sqrt(2*rate_c) * collapse_op_c and A = -iH - (1/2) sum_c Lc^dag Lc.
// The fold relies on rho staying Hermitian, which RK4 preserves exactly here
// because the right-hand side of a Hermitian argument is Hermitian.
struct MasterEqTerms {
  Matrix drift;                 // A
  std::vector<Matrix> jumps;    // scaled Lc
};

MasterEqTerms make_master_terms(const Matrix& hamiltonian, const std::vector<CollapseChannel>& channels);

struct RhsWorkspace {
  Matrix t1, t2;
  void resize(int dim);
};

void master_rhs(const MasterEqTerms& terms, const Matrix& rho, Matrix& out, RhsWorkspace& ws, Exec exec);

// Textbook form evaluated with Eigen expressions, kept as the serial
// reference the fused kernel is tested and benchmarked against.
void master_rhs_reference(const Matrix& hamiltonian, const std::vector<CollapseChannel>& channels,
                          const Matrix& rho, Matrix& out);

}  // namespace tqm::kernels
