#include "tqm/wannier.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tqm/errors.hpp"
#include "tqm/types.hpp"

namespace tqm::wannier {

namespace {

constexpr double kRelTol = 1e-8;

template <typename F>
double integrate(F&& f) {
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 15, kRelTol, &error,
      &l1);
  if (!(error <= kRelTol * std::max(l1, 1e-300)) || !std::isfinite(value)) {
    throw QuadratureError("wannier: quadrature failed to reach relative tolerance 1e-8");
  }
  return value;
}

}  // namespace

void WannierInputs::validate() const {
  if (!(v0 > 0.0)) throw std::invalid_argument("WannierInputs: v0 must be > 0");
  if (!(k0 > 0.0)) throw std::invalid_argument("WannierInputs: k0 must be > 0");
  if (!(mass > 0.0)) throw std::invalid_argument("WannierInputs: mass must be > 0");
  if (!(std::abs(delta_one_photon) >= 5.0 * std::abs(omega_rabi))) {
    throw std::invalid_argument("WannierInputs: need |delta_one_photon| >= 5 |omega_rabi|");
  }
}

double so_overlap_integral(const WannierInputs& inputs, double shift) {
  inputs.validate();
  const double a = kPi / (2.0 * inputs.k0);
  const double omega = std::sqrt(8.0 * inputs.v0 * inputs.k0 * inputs.k0 / inputs.mass);
  const double mw = inputs.mass * omega;
  const double norm = std::sqrt(mw / kPi);  // squared Gaussian normalization
  const double k2 = 2.0 * inputs.k0;
  return integrate([&](double x) {
    const double xl = x - shift;
    const double xr = x - shift - a;
    return norm * std::exp(-0.5 * mw * (xl * xl + xr * xr)) * std::sin(k2 * x);
  });
}

HoppingIntegrals hopping_integrals(const WannierInputs& inputs) {
  inputs.validate();
  HoppingIntegrals out;
  out.lattice_constant = kPi / (2.0 * inputs.k0);
  out.trap_frequency = std::sqrt(8.0 * inputs.v0 * inputs.k0 * inputs.k0 / inputs.mass);
  out.recoil_energy = inputs.k0 * inputs.k0 / (2.0 * inputs.mass);
  out.detuning_marginal = std::abs(inputs.delta_one_photon) < 10.0 * std::abs(inputs.omega_rabi);

  const double a = out.lattice_constant;
  const double mw = inputs.mass * out.trap_frequency;
  const double norm = std::sqrt(mw / kPi);
  const double k2 = 2.0 * inputs.k0;

  // <phi_0| -(1/2m) d^2/dx^2 - v0 cos^2(2 k0 x) |phi_a> with the Gaussian
  // identity phi_a'' = (mw^2 (x-a)^2 - mw) phi_a
  const double h01 = integrate([&](double x) {
    const double xr = x - a;
    const double pair = norm * std::exp(-0.5 * mw * (x * x + xr * xr));
    const double kinetic = -(mw * mw * xr * xr - mw) / (2.0 * inputs.mass);
    const double c = std::cos(k2 * x);
    return pair * (kinetic - inputs.v0 * c * c);
  });
  out.t_s = -h01;

  const double prefactor =
      inputs.omega_rabi * inputs.omega_rabi / inputs.delta_one_photon;
  out.t_so = inputs.omega_rabi == 0.0 ? 0.0 : prefactor * so_overlap_integral(inputs, 0.0);
  return out;
}

}  // namespace tqm::wannier
