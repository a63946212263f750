#pragma once

#include <span>

namespace tqm {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares of y against x. Needs at least two distinct x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace tqm
