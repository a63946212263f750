// Times the fused master-equation kernel against the Eigen reference and the
// serial fold, and checks the parallel path stays bit-identical to the serial
// one. Usage: tqm_bench [max_dim]

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "tqm/kernels.hpp"
#include "tqm/operators.hpp"
#include "tqm/rng.hpp"
#include "tqm/types.hpp"

using namespace tqm;

namespace {

Matrix random_matrix(CounterRng& rng, int dim, std::uint64_t stream) {
  Matrix m(dim, dim);
  std::uint64_t idx = 0;
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r) {
      const double re = 2.0 * rng.uniform(stream, idx) - 1.0;
      const double im = 2.0 * rng.uniform(stream, idx + 1) - 1.0;
      m(r, c) = cxd(re, im);
      idx += 2;
    }
  return m;
}

double time_loop(int reps, const std::function<void()>& body) {
  body();  // warm up caches and the thread pool
  const double t0 = omp_get_wtime();
  for (int i = 0; i < reps; ++i) body();
  return (omp_get_wtime() - t0) / reps * 1e3;
}

}  // namespace

int main(int argc, char** argv) {
  const int max_dim = argc > 1 ? std::atoi(argv[1]) : 256;
  CounterRng rng(1902);

  std::printf("master-equation right-hand side, %d threads\n", omp_get_max_threads());
  std::printf("%6s %10s %10s %10s %8s %12s %12s\n", "dim", "ref_ms", "serial_ms", "openmp_ms",
              "speedup", "ser_vs_omp", "ser_vs_ref");

  for (int dim : {32, 64, 96, 128, 192, 256}) {
    if (dim > max_dim) break;
    const Matrix h_raw = random_matrix(rng, dim, 2 * dim);
    const Matrix h = 0.5 * (h_raw + h_raw.adjoint());
    std::vector<CollapseChannel> channels;
    for (int c = 0; c < 3; ++c)
      channels.push_back({"ch" + std::to_string(c), 0.1, random_matrix(rng, dim, 2 * dim + 1) / dim});

    Matrix rho_raw = random_matrix(rng, dim, 7 * dim + 5);
    Matrix rho = rho_raw * rho_raw.adjoint();
    rho /= rho.trace().real();

    const auto terms = kernels::make_master_terms(h, channels);
    kernels::RhsWorkspace ws;
    ws.resize(dim);
    Matrix out_ref(dim, dim), out_serial(dim, dim), out_omp(dim, dim);

    const int reps = std::max(2, static_cast<int>(4.0e7 / (static_cast<double>(dim) * dim * dim)));
    const double ms_ref = time_loop(
        reps, [&] { kernels::master_rhs_reference(h, channels, rho, out_ref); });
    const double ms_serial = time_loop(
        reps, [&] { kernels::master_rhs(terms, rho, out_serial, ws, kernels::Exec::serial); });
    const double ms_omp = time_loop(
        reps, [&] { kernels::master_rhs(terms, rho, out_omp, ws, kernels::Exec::parallel); });

    const double vs_omp = (out_serial - out_omp).cwiseAbs().maxCoeff();
    const double vs_ref = (out_serial - out_ref).cwiseAbs().maxCoeff();
    std::printf("%6d %10.4f %10.4f %10.4f %8.2f %12.3e %12.3e\n", dim, ms_ref, ms_serial, ms_omp,
                ms_serial / ms_omp, vs_omp, vs_ref);
    if (vs_omp != 0.0) {
      std::printf("FAIL: parallel kernel diverged from the serial fold\n");
      return 1;
    }
  }
  return 0;
}
