#include "tqm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "tqm/errors.hpp"
#include "tqm/evolve.hpp"
#include "tqm/stats.hpp"

namespace tqm::lattice {

namespace {

CompositeSpace chain_space(int n_sites) {
  return CompositeSpace({{"site", n_sites}, {"spin", 2}});
}

double site_probability(const Vector& v, int j) {
  return std::norm(v(2 * j)) + std::norm(v(2 * j + 1));
}

double mean_position(const Vector& v) {
  double x = 0.0;
  const int n = static_cast<int>(v.size()) / 2;
  for (int j = 0; j < n; ++j) x += j * site_probability(v, j);
  return x;
}

// Exponential localization length from the log of pair-binned site
// probabilities, fitted from the state's peak toward the chain interior.
// Pair bins remove the even-odd sublattice oscillation of the modes.
double localization_length(const Vector& v, int n_sites) {
  int peak = 0;
  double pmax = -1.0;
  for (int j = 0; j < n_sites; ++j) {
    const double p = site_probability(v, j);
    if (p > pmax) {
      pmax = p;
      peak = j;
    }
  }
  const int dir = (peak < n_sites / 2) ? 1 : -1;
  const int run = std::min(std::max(n_sites / 4, 6),
                           dir > 0 ? n_sites - peak : peak + 1);
  std::vector<double> xs, ys;
  for (int b = 0; 2 * b + 1 < run; ++b) {
    const int j0 = peak + dir * (2 * b);
    const int j1 = peak + dir * (2 * b + 1);
    const double q = site_probability(v, j0) + site_probability(v, j1);
    if (q < 1e-280) break;
    xs.push_back(2.0 * b + 0.5);
    ys.push_back(std::log(q));
  }
  if (xs.size() < 3) throw std::runtime_error("localization_length: not enough decay points to fit");
  const auto fit = linear_fit(xs, ys);
  if (fit.slope >= 0.0) throw std::runtime_error("localization_length: state does not decay");
  return -2.0 / fit.slope;
}

struct Diagonalization {
  RealVector evals;
  Matrix evecs;
};

Diagonalization diagonalize(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("lattice: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// Diagonalizes the position operator within the span of the given columns
// and returns the localized combinations ordered left to right.
std::vector<Vector> position_resolved(const Matrix& span_cols) {
  const int m = static_cast<int>(span_cols.cols());
  const int n_sites = static_cast<int>(span_cols.rows()) / 2;
  Matrix xproj(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      cxd acc{0.0, 0.0};
      for (int j = 0; j < n_sites; ++j) {
        acc += static_cast<double>(j) * (std::conj(span_cols(2 * j, a)) * span_cols(2 * j, b) +
                                         std::conj(span_cols(2 * j + 1, a)) * span_cols(2 * j + 1, b));
      }
      xproj(a, b) = acc;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(xproj);
  if (es.info() != Eigen::Success) throw std::runtime_error("lattice: position projection failed");
  std::vector<Vector> out;
  out.reserve(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) out.push_back(span_cols * es.eigenvectors().col(i));
  return out;  // SelfAdjointEigenSolver sorts ascending, so left to right
}

void check_pair_orthonormal(const Vector& a, const Vector& b) {
  if (std::abs(a.norm() - 1.0) > 1e-10 || std::abs(b.norm() - 1.0) > 1e-10 ||
      std::abs(a.dot(b)) > 1e-10) {
    throw std::logic_error("lattice: midgap pair lost orthonormality");
  }
}

double ramp_value(const std::vector<RampPoint>& ramp, double t) {
  if (t <= ramp.front().t) return ramp.front().gamma_0;
  if (t >= ramp.back().t) return ramp.back().gamma_0;
  for (size_t i = 1; i < ramp.size(); ++i) {
    if (t <= ramp[i].t) {
      const double f = (t - ramp[i - 1].t) / (ramp[i].t - ramp[i - 1].t);
      return ramp[i - 1].gamma_0 + f * (ramp[i].gamma_0 - ramp[i - 1].gamma_0);
    }
  }
  return ramp.back().gamma_0;
}

}  // namespace

void LatticeParams::validate() const {
  if (!(t_s > 0.0)) throw std::invalid_argument("LatticeParams: t_s must be > 0");
  if (n_sites < 2) throw std::invalid_argument("LatticeParams: n_sites must be >= 2");
  if (n_sites > 10000) throw std::invalid_argument("LatticeParams: n_sites > 10^4 rejected (dimension overflow guard)");
}

double BlochVector::norm() const { return std::hypot(d_y, d_z); }

BlochVector bloch_vector(double k, const LatticeParams& params) {
  params.validate();
  if (!(k > -kPi && k <= kPi)) throw std::invalid_argument("bloch_vector: k must lie in (-pi, pi]");
  BlochVector d;
  d.k = k;
  d.d_y = 2.0 * params.t_so * std::sin(k);
  d.d_z = -params.gamma_z + 2.0 * params.t_s * std::cos(k);
  return d;
}

int winding_number(const LatticeParams& params, int n_k) {
  params.validate();
  if (n_k < 64) throw std::invalid_argument("winding_number: n_k must be >= 64");

  double min_norm = std::numeric_limits<double>::infinity();
  double total = 0.0;
  double prev_theta = 0.0;
  for (int i = 0; i <= n_k; ++i) {
    const double k = -kPi + 2.0 * kPi * i / n_k;
    const double d_y = 2.0 * params.t_so * std::sin(k);
    const double d_z = -params.gamma_z + 2.0 * params.t_s * std::cos(k);
    min_norm = std::min(min_norm, std::hypot(d_y, d_z));
    const double theta = std::atan2(d_y, d_z);
    if (i > 0) {
      double inc = theta - prev_theta;
      // Wrap to (-pi, pi]; each grid step subtends less than a half turn
      // for any gapped parameters.
      while (inc > kPi) inc -= 2.0 * kPi;
      while (inc <= -kPi) inc += 2.0 * kPi;
      total += inc;
    }
    prev_theta = theta;
  }
  if (min_norm < 1e-9 * params.t_s) throw GapClosedError("winding_number: band gap closes on the sampled Brillouin zone");
  const double w = total / (2.0 * kPi);
  const double snapped = std::round(w);
  if (std::abs(w - snapped) > 1e-3) throw std::runtime_error("winding_number: accumulated angle is not near an integer multiple of 2*pi");
  return static_cast<int>(snapped);
}

double bulk_gap(const LatticeParams& params) {
  params.validate();
  return std::min(std::abs(2.0 * params.t_s - std::abs(params.gamma_z)), 2.0 * std::abs(params.t_so));
}

double band_minimum_scan(const LatticeParams& params, int n_k) {
  params.validate();
  if (n_k < 64) throw std::invalid_argument("band_minimum_scan: n_k must be >= 64");
  double min_norm = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_k; ++i) {
    const double k = -kPi + 2.0 * kPi * (i + 1) / n_k;
    const double d_y = 2.0 * params.t_so * std::sin(k);
    const double d_z = -params.gamma_z + 2.0 * params.t_s * std::cos(k);
    min_norm = std::min(min_norm, std::hypot(d_y, d_z));
  }
  return min_norm;
}

GapCheck bulk_gap_check(const LatticeParams& params, int n_k, double tol) {
  GapCheck c;
  c.closed_form = bulk_gap(params);
  c.scan = band_minimum_scan(params, n_k);
  c.abs_diff = std::abs(c.closed_form - c.scan);
  c.agree = c.abs_diff <= tol;
  return c;
}

HermitianOperator build_open_chain(const LatticeParams& params, const std::optional<DomainField>& domain) {
  params.validate();
  const int n = params.n_sites;
  if (domain) {
    if (params.boundary != Boundary::open) throw std::invalid_argument("build_open_chain: domain fields require an open chain");
    if (domain->x1 < 0 || domain->x2 >= n || domain->x1 > domain->x2) throw std::invalid_argument("build_open_chain: domain site_range outside the chain");
  }

  Matrix h = Matrix::Zero(2 * n, 2 * n);
  auto up = [](int j) { return 2 * j; };
  auto dn = [](int j) { return 2 * j + 1; };

  const int bonds = (params.boundary == Boundary::open) ? n - 1 : n;
  for (int b = 0; b < bonds; ++b) {
    const int j = b;
    const int jp = (b + 1) % n;
    // Same-spin hopping, opposite signs for the two spin species.
    h(up(j), up(jp)) += -params.t_s;
    h(up(jp), up(j)) += -params.t_s;
    h(dn(j), dn(jp)) += params.t_s;
    h(dn(jp), dn(j)) += params.t_s;
    // Spin-orbit: t_so (c^dag_{j,up} c_{j+1,dn} - c^dag_{j+1,up} c_{j,dn}) + h.c.
    h(up(j), dn(jp)) += params.t_so;
    h(dn(jp), up(j)) += params.t_so;
    h(up(jp), dn(j)) += -params.t_so;
    h(dn(j), up(jp)) += -params.t_so;
  }
  for (int j = 0; j < n; ++j) {
    h(up(j), up(j)) += params.gamma_z;
    h(dn(j), dn(j)) += -params.gamma_z;
  }
  if (domain) {
    for (int j = domain->x1; j <= domain->x2; ++j) {
      if (domain->axis == DomainAxis::z) {
        h(up(j), up(j)) += domain->gamma_0;
        h(dn(j), dn(j)) += -domain->gamma_0;
      } else {
        h(up(j), dn(j)) += cxd{0.0, -domain->gamma_0};
        h(dn(j), up(j)) += cxd{0.0, domain->gamma_0};
      }
    }
  }
  return HermitianOperator(chain_space(n), std::move(h));
}

MidgapPair zero_modes(const LatticeParams& params) {
  params.validate();
  if (params.boundary != Boundary::open) throw std::invalid_argument("zero_modes: requires an open chain");
  if (winding_number(params) == 0) throw NotTopologicalError("zero_modes: parameters are in the trivial phase");

  const auto h = build_open_chain(params);
  const auto eig = diagonalize(h.matrix());
  const int dim = static_cast<int>(eig.evals.size());
  std::vector<int> order(static_cast<size_t>(dim));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(eig.evals(a)) < std::abs(eig.evals(b)); });

  Matrix span(dim, 2);
  span.col(0) = eig.evecs.col(order[0]);
  span.col(1) = eig.evecs.col(order[1]);
  auto localized = position_resolved(span);
  check_pair_orthonormal(localized[0], localized[1]);

  MidgapPair pair;
  pair.energies = {eig.evals(order[0]), eig.evals(order[1])};
  std::sort(pair.energies.begin(), pair.energies.end());
  pair.splitting = pair.energies[1] - pair.energies[0];
  const auto space = chain_space(params.n_sites);
  pair.states = {StateVector(space, localized[0]), StateVector(space, localized[1])};
  pair.localization_lengths = {localization_length(localized[0], params.n_sites),
                               localization_length(localized[1], params.n_sites)};
  return pair;
}

MidgapPair midgap_states(const LatticeParams& params, const DomainField& domain) {
  params.validate();
  // The field must gap the domain interior into the trivial phase. A y-axis
  // field opens a transverse mass against the spin-orbit term; a z-axis
  // field shifts the on-site imbalance, so it must push |gamma_z + gamma_0|
  // past the 2 t_s transition.
  if (domain.axis == DomainAxis::y) {
    if (!(std::abs(domain.gamma_0) > 2.0 * std::abs(params.t_so))) {
      throw DomainTooWeakError("midgap_states: |gamma_0| must exceed 2|t_so| to open a y-axis mass domain");
    }
  } else {
    if (!(std::abs(params.gamma_z + domain.gamma_0) > 2.0 * params.t_s)) {
      throw DomainTooWeakError("midgap_states: |gamma_z + gamma_0| must exceed 2 t_s to open a z-axis mass domain");
    }
  }

  const auto h = build_open_chain(params, domain);
  const auto eig = diagonalize(h.matrix());
  const double gap = bulk_gap(params);
  const int dim = static_cast<int>(eig.evals.size());

  // States strictly inside the bulk gap. With topological surroundings this
  // span holds chain-end modes as well as the wall pair, and as the field
  // weakens, domain-confined excited levels also dip below the gap edge.
  std::vector<int> inside;
  for (int i = 0; i < dim; ++i) {
    if (std::abs(eig.evals(i)) < gap * (1.0 - 1e-9)) inside.push_back(i);
  }
  if (inside.size() < 2) throw std::runtime_error("midgap_states: fewer than two states inside the bulk gap");

  // Keep the four deepest levels: the wall pair plus, when the surrounding
  // chain is topological, the two chain-end modes. Domain-confined excited
  // levels (which dip below the gap edge as the field weakens and overlap
  // the walls spatially) have larger |E| and are excluded here. The four
  // kept states are mutually non-overlapping, so the position resolution
  // separates them cleanly; the wall states are the ones nearest x1/x2.
  std::sort(inside.begin(), inside.end(), [&](int a, int b) { return std::abs(eig.evals(a)) < std::abs(eig.evals(b)); });
  const int m = std::min<int>(4, static_cast<int>(inside.size()));
  Matrix span(dim, m);
  for (int i = 0; i < m; ++i) span.col(i) = eig.evecs.col(inside[static_cast<size_t>(i)]);
  auto localized = position_resolved(span);

  auto nearest = [&](double x) {
    size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < localized.size(); ++i) {
      const double d = std::abs(mean_position(localized[i]) - x);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  const size_t left = nearest(static_cast<double>(domain.x1));
  const size_t right = nearest(static_cast<double>(domain.x2));
  if (left == right) throw std::runtime_error("midgap_states: could not resolve two distinct wall states");
  check_pair_orthonormal(localized[left], localized[right]);

  // Two-level reduction in the wall basis. At moderate fields the walls
  // span the exact doublet and these are its exact eigenvalues; at very
  // strong fields the walls hybridize with their own segment's chain end
  // instead of each other, and the reduction degrades gracefully to the
  // (near-zero) wall expectation values.
  Matrix h_eff(2, 2);
  const Vector hl = h.matrix() * localized[left];
  const Vector hr = h.matrix() * localized[right];
  h_eff(0, 0) = localized[left].dot(hl);
  h_eff(0, 1) = localized[left].dot(hr);
  h_eff(1, 0) = localized[right].dot(hl);
  h_eff(1, 1) = localized[right].dot(hr);
  Eigen::SelfAdjointEigenSolver<Matrix> eff(0.5 * (h_eff + Matrix(h_eff.adjoint())));

  MidgapPair pair;
  pair.energies = {eff.eigenvalues()(0), eff.eigenvalues()(1)};
  pair.splitting = pair.energies[1] - pair.energies[0];
  const auto space = chain_space(params.n_sites);
  pair.states = {StateVector(space, localized[left]), StateVector(space, localized[right])};
  pair.localization_lengths = {localization_length(localized[left], params.n_sites),
                               localization_length(localized[right], params.n_sites)};
  return pair;
}

std::vector<BlochSample> tsq_rotation(const LatticeParams& params, const DomainField& domain,
                                      const std::vector<RampPoint>& ramp, double dt,
                                      int n_samples, double leakage_limit) {
  params.validate();
  if (ramp.size() < 2) throw std::invalid_argument("tsq_rotation: ramp needs at least two points");
  if (ramp.front().t != 0.0) throw std::invalid_argument("tsq_rotation: ramp must start at t = 0");
  for (size_t i = 1; i < ramp.size(); ++i) {
    if (!(ramp[i].t > ramp[i - 1].t)) throw std::invalid_argument("tsq_rotation: ramp times must be strictly increasing");
  }
  if (dt <= 0.0) throw std::invalid_argument("tsq_rotation: dt must be > 0");

  auto domain_at = [&](double g0) {
    DomainField d = domain;
    d.gamma_0 = g0;
    return d;
  };

  auto pair = midgap_states(params, domain_at(ramp.front().gamma_0));
  Vector psi = pair.states[0].amplitudes();
  std::array<Vector, 2> basis{pair.states[0].amplitudes(), pair.states[1].amplitudes()};

  const double t_final = ramp.back().t;
  if (n_samples <= 0) n_samples = static_cast<int>(std::ceil(t_final / dt)) + 1;
  if (n_samples < 2) n_samples = 2;

  std::vector<BlochSample> out;
  out.reserve(static_cast<size_t>(n_samples));

  auto record = [&](double t) {
    const double g0 = ramp_value(ramp, t);
    auto cur = midgap_states(params, domain_at(g0));
    std::array<Vector, 2> b{cur.states[0].amplitudes(), cur.states[1].amplitudes()};
    // Track the pair continuously: match by overlap, then fix each phase.
    const double keep = std::norm(basis[0].dot(b[0])) + std::norm(basis[1].dot(b[1]));
    const double swap = std::norm(basis[0].dot(b[1])) + std::norm(basis[1].dot(b[0]));
    if (swap > keep) std::swap(b[0], b[1]);
    for (int i = 0; i < 2; ++i) {
      const cxd o = basis[i].dot(b[i]);  // <basis_i | b_i>
      if (std::abs(o) > 1e-12) b[i] *= std::conj(o) / std::abs(o);
    }
    basis = b;

    const cxd c0 = basis[0].dot(psi);
    const cxd c1 = basis[1].dot(psi);
    const double p = std::norm(c0) + std::norm(c1);
    BlochSample s;
    s.t = t;
    s.gamma_0 = g0;
    s.leakage = 1.0 - p;
    s.splitting = cur.splitting;
    if (!(s.leakage <= leakage_limit)) {
      throw LeakageExceededError("tsq_rotation: leakage " + std::to_string(s.leakage) + " at t = " + std::to_string(t) + " (ramp too fast)");
    }
    const cxd a0 = c0 / std::sqrt(p);
    const cxd a1 = c1 / std::sqrt(p);
    s.bx = 2.0 * (std::conj(a0) * a1).real();
    s.by = 2.0 * (std::conj(a0) * a1).imag();
    s.bz = std::norm(a0) - std::norm(a1);
    out.push_back(s);
  };

  record(0.0);
  for (int sidx = 1; sidx < n_samples; ++sidx) {
    const double t0 = t_final * (sidx - 1) / (n_samples - 1);
    const double t1 = t_final * sidx / (n_samples - 1);
    const int substeps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-12)));
    const double h_step = (t1 - t0) / substeps;
    for (int i = 0; i < substeps; ++i) {
      const double t_mid = t0 + (i + 0.5) * h_step;
      const auto h = build_open_chain(params, domain_at(ramp_value(ramp, t_mid)));
      SpectralPropagator prop(h.matrix());
      psi = prop.advance(psi, h_step);
    }
    record(t1);
  }
  return out;
}

}  // namespace tqm::lattice
