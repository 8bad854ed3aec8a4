#pragma once

#include <span>

namespace legdamp {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double residual_rms = 0.0;
};

/// Ordinary least squares y = slope x + intercept. Requires >= 2 points with
/// distinct x; throws AnalysisError otherwise.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace legdamp
