#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace tqm {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;
inline constexpr cxd kI{0.0, 1.0};

}  // namespace tqm
