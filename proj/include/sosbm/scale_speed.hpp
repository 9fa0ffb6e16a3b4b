#pragma once

// Generic change of variables for diffusions with a single threshold at 0
// described by a piecewise-linear scale and a piecewise-constant speed
// density plus an atom. Used to identify the skew-sticky process obtained
// from an SOS-BM by a piecewise-linear map, independently of the closed-form
// parameter map in transforms.hpp.

#include <stdexcept>

#include "sosbm/params.hpp"

namespace sosbm {

/// Scale s(y) = scale_slope_{-,+} * y on each half-line, speed
/// m(dy) = speed_density_{-,+} dy + atom delta_0, generator (1/2) D_m D_s.
struct ScaleSpeed {
  double scale_slope_minus;
  double scale_slope_plus;
  double speed_density_minus;
  double speed_density_plus;
  double atom;
};

inline ScaleSpeed scale_speed_of(const SosBmParams& p) {
  // s_0(x) = x / a(x), m_0(dx) = a(x) / sigma_0(x)^2 dx + rho delta_0.
  return {1.0 / (1.0 - p.beta), 1.0 / (1.0 + p.beta),
          (1.0 - p.beta) / (p.sigma_minus * p.sigma_minus),
          (1.0 + p.beta) / (p.sigma_plus * p.sigma_plus), p.rho};
}

/// Image of (s, m) under y = x / k_{-,+} on each half-line.
inline ScaleSpeed push_forward_linear(const ScaleSpeed& ss, double k_minus, double k_plus) {
  return {ss.scale_slope_minus * k_minus, ss.scale_slope_plus * k_plus,
          ss.speed_density_minus * k_minus, ss.speed_density_plus * k_plus, ss.atom};
}

/// Identifies the skew-sticky BM with the given (s, m) pair. Requires unit
/// volatility on both sides, i.e. scale_slope * speed_density = 1.
inline SkewStickyParams canonical_skew_sticky(const ScaleSpeed& ss) {
  constexpr double tol = 1e-12;
  if (std::fabs(ss.scale_slope_minus * ss.speed_density_minus - 1.0) > tol ||
      std::fabs(ss.scale_slope_plus * ss.speed_density_plus - 1.0) > tol)
    throw std::invalid_argument("canonical_skew_sticky: pair does not describe unit volatility");
  // (s, m) ~ (s / k, k m); SkS form has speed densities 1 -/+ beta with sum 2.
  const double k = 2.0 / (ss.speed_density_minus + ss.speed_density_plus);
  const double beta = k * ss.speed_density_plus - 1.0;
  return SkewStickyParams{k * ss.atom, std::clamp(beta, -1.0, 1.0)};
}

/// Skew-sticky image of an SOS-BM under x -> x / sigma_0(x).
inline SkewStickyParams skew_sticky_image(const SosBmParams& p) {
  return canonical_skew_sticky(push_forward_linear(scale_speed_of(p), p.sigma_minus, p.sigma_plus));
}

}  // namespace sosbm
