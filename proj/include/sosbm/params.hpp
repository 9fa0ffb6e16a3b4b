#pragma once

// Parameter types of the skew-sticky (SkS-BM) and skew-oscillating-sticky
// (SOS-BM) Brownian motions, and their speed measures.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include "sosbm/errors.hpp"
#include "sosbm/numerics.hpp"

namespace sosbm {

/// sgn with sgn(0) = 0.
inline double sign0(double y) { return y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0); }

/// Stickiness rho >= 0 and skewness beta in [-1, 1].
struct SkewStickyParams {
  double rho = 0.0;
  double beta = 0.0;

  SkewStickyParams() = default;
  SkewStickyParams(double rho_, double beta_) : rho(rho_), beta(beta_) { validate(); }

  void validate() const {
    if (!(rho >= 0.0) || !std::isfinite(rho))
      throw std::invalid_argument("SkewStickyParams: rho must be finite and >= 0");
    if (!(beta >= -1.0 && beta <= 1.0))
      throw std::invalid_argument("SkewStickyParams: beta must lie in [-1, 1]");
  }

  bool reflected() const { return std::fabs(beta) >= 1.0; }

  void require_non_reflected(const char* where) const {
    if (reflected()) throw ReflectionUnsupported(where);
  }

  /// Skew weight a(y) = 1 + sgn(y) beta.
  double skew_weight(double y) const { return 1.0 + sign0(y) * beta; }

  /// Parameters of the rescaled process sqrt(c) X_{t/c}: stickiness rho / sqrt(c).
  SkewStickyParams rescaled(double c) const { return {rho / std::sqrt(c), beta}; }

  friend bool operator==(const SkewStickyParams&, const SkewStickyParams&) = default;
};

/// SkS-BM parameters plus the volatility levels left and right of 0.
struct SosBmParams {
  double rho = 0.0;
  double beta = 0.0;
  double sigma_minus = 1.0;
  double sigma_plus = 1.0;

  SosBmParams() = default;
  SosBmParams(double rho_, double beta_, double sigma_minus_, double sigma_plus_)
      : rho(rho_), beta(beta_), sigma_minus(sigma_minus_), sigma_plus(sigma_plus_) {
    validate();
  }
  explicit SosBmParams(const SkewStickyParams& p) : SosBmParams(p.rho, p.beta, 1.0, 1.0) {}

  void validate() const {
    (void)SkewStickyParams{rho, beta};
    if (!(sigma_minus > 0.0) || !std::isfinite(sigma_minus) || !(sigma_plus > 0.0) ||
        !std::isfinite(sigma_plus))
      throw std::invalid_argument("SosBmParams: sigma_minus and sigma_plus must be positive and finite");
  }

  /// sigma_0(y): sigma_minus for y <= 0, sigma_plus for y > 0.
  double sigma0(double y) const { return y > 0.0 ? sigma_plus : sigma_minus; }

  bool is_skew_sticky() const { return sigma_minus == 1.0 && sigma_plus == 1.0; }
  SkewStickyParams skew_sticky() const { return {rho, beta}; }

  friend bool operator==(const SosBmParams&, const SosBmParams&) = default;
};

/// Speed measure m(dy) = a(y) / sigma_0(y)^2 dy + rho delta_0(dy).
class SpeedMeasure {
 public:
  explicit SpeedMeasure(const SosBmParams& p) : p_(p) {}
  explicit SpeedMeasure(const SkewStickyParams& p) : p_(SosBmParams(p)) {}

  double atom() const { return p_.rho; }

  /// Density of the absolutely continuous part; at y = 0 uses a(0) = 1.
  double density(double y) const {
    const double s = p_.sigma0(y);
    return (1.0 + sign0(y) * p_.beta) / (s * s);
  }

  /// m^{(gamma)}(h) = int |y|^gamma |h(y)| m(dy) when absolute is set,
  /// otherwise m(h) for gamma = 0 (signed). The atom contributes only for gamma = 0.
  template <class H>
  double integral(H&& h, double gamma = 0.0, bool absolute = false, double support_lo = -INFINITY,
                  double support_hi = INFINITY, std::span<const double> extra_breaks = {},
                  const QuadratureSpec& spec = {}) const {
    if (!(gamma >= 0.0)) throw std::invalid_argument("SpeedMeasure::integral: gamma must be >= 0");
    auto integrand = [&](double y) {
      double v = h(y);
      if (absolute) v = std::fabs(v);
      if (gamma > 0.0) v *= std::pow(std::fabs(y), gamma);
      return v * density(y);
    };
    std::vector<double> breaks(extra_breaks.begin(), extra_breaks.end());
    breaks.push_back(0.0);
    const double lo = std::min(support_lo, 0.0);
    const double hi = std::max(support_hi, 0.0);
    double value = require(integrate(integrand, lo, hi, breaks, spec), "SpeedMeasure::integral");
    if (gamma == 0.0 && p_.rho > 0.0) {
      const double h0 = h(0.0);
      value += p_.rho * (absolute ? std::fabs(h0) : h0);
    }
    return value;
  }

  const SosBmParams& params() const { return p_; }

 private:
  SosBmParams p_;
};

}  // namespace sosbm
