#pragma once

// Curve fitters for the characterization experiments.

#include <string>
#include <vector>

#include "lgi/noise.hpp"

namespace lgi {

struct DecayFit {
  bool converged = false;
  std::string message;
  double t2_star_s = 0.0;
  double t2_star_err_s = 0.0;
  double amplitude = 0.0;
  double detuning_hz = 0.0;
  double phase = 0.0;
  double offset = 0.0;
  double rms_residual = 0.0;
};

/// Least squares against A exp(-(t/T2*)^2) cos(2 pi delta t + phi) + C.
/// Needs at least 5 points; degenerate data (no visible decay) comes back
/// with converged = false and a reason in `message`.
DecayFit fit_gaussian_decay(const std::vector<CurvePoint>& points);

struct FlipFit {
  bool converged = false;
  std::string message;
  double p_hat = 0.0;
  double p_err = 0.0;
};

/// Log-linear regression ln P0(k) = a + k ln p over the repeated-gate curve.
FlipFit fit_flip_probability(const std::vector<CurvePoint>& points);

}  // namespace lgi
