#pragma once

// Numerical audits of the kernel: normalization, Chapman-Kolmogorov,
// pointwise Gaussian envelope, semigroup decay bounds, the aggregate
// semigroup action, and time-space scaling. Each audit returns a
// VerificationReport; fitted constants are reported rather than assumed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sosbm/kernel.hpp"
#include "sosbm/report.hpp"
#include "sosbm/rng.hpp"

namespace sosbm {

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) out.push_back(lo * std::pow(hi / lo, i / static_cast<double>(points - 1)));
  return out;
}

inline std::vector<double> linear_grid(double lo, double hi, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) out.push_back(lo + (hi - lo) * i / static_cast<double>(points - 1));
  return out;
}

// Least-squares slope of log y against log x.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Normalization and Chapman-Kolmogorov

/// atom + int of the continuous density = 1, with the continuous part
/// integrated by quadrature (independently of the closed-form CDF).
inline VerificationReport verify_normalization(const std::vector<SkewStickyParams>& cells,
                                               const std::vector<double>& times, const std::vector<double>& starts,
                                               double tol = 1e-8) {
  VerificationReport report;
  report.name = "normalization";
  double worst = 0.0;
  for (const auto& p : cells) {
    for (double t : times) {
      for (double x : starts) {
        const auto [lo, hi] = kernel_domain(t, x, 12.0);
        const double breaks[] = {0.0, x};
        const double mass = require(integrate([&](double y) { return y == 0.0 ? 0.0 : continuous_density(p, t, x, y); },
                                              lo, hi, breaks),
                                    "verify_normalization");
        const double total = mass + atom_probability(p, t, x);
        worst = std::max(worst, std::fabs(total - 1.0));
        report.add({"mass rho=" + format_double(p.rho) + " beta=" + format_double(p.beta), t, x, NAN, total, 1.0,
                    total, std::fabs(total - 1.0) < tol});
      }
    }
  }
  report.fitted["max_abs_error"] = worst;
  return report;
}

/// int p(s, x, z) p(t, z, y) m(dz) = p(s + t, x, y) for random (s, t, x, y).
inline VerificationReport verify_chapman_kolmogorov(const SkewStickyParams& p, int count, std::uint64_t seed,
                                                    std::uint64_t stream = 0, double tol = 1e-6) {
  p.require_non_reflected("verify_chapman_kolmogorov");
  VerificationReport report;
  report.name = "chapman_kolmogorov";
  RngStream rng(seed, stream);
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const double s = 0.05 + 1.95 * rng.uniform();
    const double t = 0.05 + 1.95 * rng.uniform();
    const double x = -2.0 + 4.0 * rng.uniform();
    const double y = -2.0 + 4.0 * rng.uniform();
    const double r = 12.0 * std::sqrt(std::max(s, t));
    const double breaks[] = {0.0, x, y};
    const double cont = require(
        integrate(
            [&](double z) {
              if (z == 0.0) return 0.0;
              return transition_density(p, s, x, z) * transition_density(p, t, z, y) * p.skew_weight(z);
            },
            std::min({x, y, 0.0}) - r, std::max({x, y, 0.0}) + r, breaks),
        "verify_chapman_kolmogorov");
    const double atom = p.rho * transition_density(p, s, x, 0.0) * transition_density(p, t, 0.0, y);
    const double lhs = cont + atom;
    const double rhs = transition_density(p, s + t, x, y);
    worst = std::max(worst, std::fabs(lhs - rhs));
    report.add({"ck rho=" + format_double(p.rho) + " beta=" + format_double(p.beta) + " s=" + format_double(s),
                t, x, y, lhs, rhs, lhs / rhs, std::fabs(lhs - rhs) < tol});
  }
  report.fitted["max_abs_error"] = worst;
  return report;
}

// ---------------------------------------------------------------------------
// Pointwise envelope p <= K u1

/// Fitted Mills constant: sup_z z exp(z^2) erfc(z) over a grid reaching z = 1e6.
/// The supremum is the limit 1 / sqrt(pi), approached from below.
inline double fitted_mills_constant() {
  double k = 0.0;
  for (double z : detail::log_grid(1e-3, 1e6, 400)) k = std::max(k, z * scaled_erfc(z));
  return k;
}

/// Analytic envelope constant max(sqrt(pi) K_Mills, 2 / (1 - |beta|)).
inline double kernel_bound_constant(double beta, double mills = 1.0 / kSqrtPi) {
  return std::max(kSqrtPi * mills, 2.0 / (1.0 - std::fabs(beta)));
}

inline double max_kernel_ratio(const SkewStickyParams& p, const std::vector<double>& times,
                               const std::vector<double>& points) {
  double worst = 0.0;
  for (double t : times)
    for (double x : points)
      for (double y : points) {
        const double g = u1(t, x, y);
        if (g < 1e-280) continue;  // ratio of two underflowed numbers carries no information
        worst = std::max(worst, transition_density(p, t, x, y) / g);
      }
  return worst;
}

/// Fits K = max p / u1 on a coarse grid and checks it on a refined grid
/// (at most 10% excess) and against the analytic constant.
inline VerificationReport verify_kernel_bound(const SkewStickyParams& p, double headroom = 0.10) {
  p.require_non_reflected("verify_kernel_bound");
  VerificationReport report;
  report.name = "kernel_bound rho=" + format_double(p.rho) + " beta=" + format_double(p.beta);
  const double mills = fitted_mills_constant();
  const double analytic = kernel_bound_constant(p.beta, mills);
  const double fitted = max_kernel_ratio(p, {0.1, 1.0, 10.0}, detail::linear_grid(-5.0, 5.0, 21));
  const double refined = max_kernel_ratio(p, detail::log_grid(0.01, 100.0, 17), detail::linear_grid(-5.0, 5.0, 201));
  report.fitted["K_mills"] = mills;
  report.fitted["K_fit"] = fitted;
  report.fitted["K_refined"] = refined;
  report.fitted["K_analytic"] = analytic;
  report.add({"p/u1 refined vs fitted", NAN, p.rho, p.beta, refined, fitted, refined / fitted,
              std::isfinite(fitted) && refined <= (1.0 + headroom) * fitted});
  report.add({"p/u1 refined vs analytic", NAN, p.rho, p.beta, refined, analytic, refined / analytic,
              refined <= analytic * (1.0 + 1e-12)});
  report.add({"mills constant", NAN, NAN, NAN, mills, 1.0 / kSqrtPi, mills * kSqrtPi,
              mills <= 1.0 / kSqrtPi * (1.0 + 1e-12) && mills > 0.99 / kSqrtPi});
  return report;
}

// ---------------------------------------------------------------------------
// Semigroup decay

struct SemigroupProbe {
  std::function<double(double)> h;
  std::vector<double> breaks;
};

/// Narrow Gaussian bump exp(-y^2 / (2 w^2)).
inline SemigroupProbe gaussian_bump(double width = 0.1) {
  return {[width](double y) { return std::exp(-0.5 * y * y / (width * width)); },
          {-5.0 * width, -2.0 * width, -width, width, 2.0 * width, 5.0 * width}};
}

/// Odd bump divided by a(y), so that m_{(rho, beta)}(h) = 0 for every rho.
inline SemigroupProbe balanced_bump(const SkewStickyParams& p, double width = 0.1) {
  return {[width, p](double y) { return y * std::exp(-0.5 * y * y / (width * width)) / p.skew_weight(y); },
          {-5.0 * width, -2.0 * width, -width, width, 2.0 * width, 5.0 * width}};
}

inline double sup_semigroup(const SkewStickyParams& p, double t, const SemigroupProbe& probe) {
  double m = 0.0;
  for (int k = -16; k <= 16; ++k) {
    const double x = 0.25 * k * std::sqrt(t);
    m = std::max(m, std::fabs(semigroup_apply(p, t, probe.h, x, probe.breaks)));
  }
  return m;
}

/// Decay of sup_x |P_t h| in t: slope -1/2 for a bump and -1 for a balanced
/// bump (m(h) = 0), fitted over t in [1, 100] (1 + rho^2), after the sticky
/// time scale rho^2. Also reports the smallest constants K in
///   |P_t h(x)| <= K m(|h|) / sqrt(t),
///   |P_t h(x) - m(h) p(t, x, 0)| <= K_gamma / t (m1 + m1 / (1 + |x / sqrt t|^g) + m_g / (1 + |x|^g)).
inline VerificationReport verify_semigroup_bounds(const SkewStickyParams& p, double gamma = 2.0,
                                                  double slope_tol = 0.1) {
  p.require_non_reflected("verify_semigroup_bounds");
  VerificationReport report;
  report.name = "semigroup rho=" + format_double(p.rho) + " beta=" + format_double(p.beta);
  const SemigroupProbe bump = gaussian_bump();
  const SemigroupProbe balanced = balanced_bump(p);
  const double t0 = 1.0 + p.rho * p.rho;
  const std::vector<double> times = detail::log_grid(t0, 100.0 * t0, 9);

  std::vector<double> sup_bump;
  std::vector<double> sup_balanced;
  for (double t : times) {
    sup_bump.push_back(sup_semigroup(p, t, bump));
    sup_balanced.push_back(sup_semigroup(p, t, balanced));
  }
  const double slope_bump = detail::log_log_slope(times, sup_bump);
  const double slope_balanced = detail::log_log_slope(times, sup_balanced);
  report.fitted["slope_bump"] = slope_bump;
  report.fitted["slope_balanced"] = slope_balanced;
  report.add({"slope sup|P_t h|", NAN, p.rho, p.beta, slope_bump, -0.5, slope_bump / -0.5,
              std::fabs(slope_bump + 0.5) <= slope_tol});
  report.add({"slope sup|P_t h| m(h)=0", NAN, p.rho, p.beta, slope_balanced, -1.0, -slope_balanced,
              std::fabs(slope_balanced + 1.0) <= slope_tol});

  // Fitted constants over a wider (t, x) grid.
  const SpeedMeasure m(p);
  const SpeedMeasure m_skew(SkewStickyParams{0.0, p.beta});
  const double lo = -1.0;
  const double hi = 1.0;
  const double m_abs_bump = m.integral(bump.h, 0.0, true, lo, hi, bump.breaks);
  const double m1 = m_skew.integral(balanced.h, 1.0, true, lo, hi, balanced.breaks);
  const double mg = m_skew.integral(balanced.h, gamma, true, lo, hi, balanced.breaks);
  double k_53 = 0.0;
  double k_54 = 0.0;
  for (double t : detail::log_grid(0.01, 100.0 * t0, 13)) {
    for (double x : {-3.0, -1.0, -0.3, 0.0, 0.3, 1.0, 3.0}) {
      const double a = std::fabs(semigroup_apply(p, t, bump.h, x, bump.breaks));
      k_53 = std::max(k_53, a * std::sqrt(t) / m_abs_bump);
      const double b = std::fabs(semigroup_apply(p, t, balanced.h, x, balanced.breaks));
      const double rhs = (m1 + m1 / (1.0 + std::pow(std::fabs(x) / std::sqrt(t), gamma)) +
                          mg / (1.0 + std::pow(std::fabs(x), gamma))) / t;
      k_54 = std::max(k_54, b / rhs);
    }
  }
  report.fitted["K_decay_half"] = k_53;
  report.fitted["K_decay_one"] = k_54;
  report.add({"K sqrt(t) bound", NAN, p.rho, p.beta, k_53, NAN, NAN, std::isfinite(k_53) && k_53 > 0.0});
  report.add({"K_gamma / t bound", NAN, p.rho, p.beta, k_54, NAN, NAN, std::isfinite(k_54) && k_54 > 0.0});
  return report;
}

// ---------------------------------------------------------------------------
// Aggregate semigroup action

/// gamma_n[h] <= K m_{(rho sqrt n, beta)}(|h|) sqrt(n t) for a bump, and for a
/// balanced h (m_{(rho sqrt n, beta)}(h) = 0 for all n) growth at most
/// logarithmic: gamma_n <= K m_{(0, beta)}(|h|) (1 + max(0, log(n t))).
inline VerificationReport verify_gamma_bounds(const SkewStickyParams& p, const std::vector<long>& ladder,
                                              double t = 1.0, double x = 0.5) {
  p.require_non_reflected("verify_gamma_bounds");
  VerificationReport report;
  report.name = "gamma_n rho=" + format_double(p.rho) + " beta=" + format_double(p.beta);
  const SemigroupProbe bump = gaussian_bump(0.5);
  const SemigroupProbe balanced = balanced_bump(p, 0.5);
  const double m_skew_abs =
      SpeedMeasure(SkewStickyParams{0.0, p.beta}).integral(balanced.h, 0.0, true, -4.0, 4.0, balanced.breaks);
  std::vector<double> k_log;
  double k_sqrt = 0.0;
  for (long n : ladder) {
    const SpeedMeasure mn(SkewStickyParams{p.rho * std::sqrt(static_cast<double>(n)), p.beta});
    const double g1 = gamma_n(p, bump.h, n, t, x, bump.breaks);
    const double bound1 = mn.integral(bump.h, 0.0, true, -4.0, 4.0, bump.breaks) * std::sqrt(n * t);
    k_sqrt = std::max(k_sqrt, std::fabs(g1) / bound1);
    const double g2 = gamma_n(p, balanced.h, n, t, x, balanced.breaks);
    const double bound2 = m_skew_abs * (1.0 + std::max(0.0, std::log(n * t)));
    k_log.push_back(std::fabs(g2) / bound2);
    report.add({"gamma_n/(m sqrt(nt)) n=" + std::to_string(n), t, x, NAN, g1, bound1, g1 / bound1,
                std::isfinite(g1)});
    report.add({"gamma_n/(m0|h| log) n=" + std::to_string(n), t, x, NAN, g2, bound2, g2 / bound2,
                std::isfinite(g2)});
  }
  report.fitted["K_sqrt"] = k_sqrt;
  const double k_max = *std::max_element(k_log.begin(), k_log.end());
  report.fitted["K_log"] = k_max;
  // Logarithmic growth: the normalized ratio does not keep increasing.
  const double head = k_log.size() > 1 ? *std::max_element(k_log.begin(), k_log.end() - 1) : k_log.back();
  report.add({"log growth", t, x, NAN, k_log.back(), head, k_log.back() / head,
              std::isfinite(k_max) && k_log.back() <= 1.1 * head + 1e-12});
  return report;
}

// ---------------------------------------------------------------------------
// Time-space scaling

/// E_x h(x, X_{ct}) under (rho, beta) equals E_{x / sqrt c} h(x, sqrt(c) X_t)
/// under (rho / sqrt c, beta), both by quadrature.
inline VerificationReport verify_scaling(const SkewStickyParams& p, double c, double tol = 1e-7) {
  p.require_non_reflected("verify_scaling");
  if (!(c > 0.0)) throw std::invalid_argument("verify_scaling: c must be positive");
  VerificationReport report;
  report.name = "scaling rho=" + format_double(p.rho) + " beta=" + format_double(p.beta) + " c=" + format_double(c);
  struct Test {
    const char* name;
    std::function<double(double, double)> h;
  };
  const std::vector<Test> battery = {
      {"exp(-y^2)", [](double, double y) { return std::exp(-y * y); }},
      {"y exp(-y^2/2)", [](double, double y) { return y * std::exp(-0.5 * y * y); }},
      {"y^2", [](double, double y) { return y * y; }},
      {"(1+xy) exp(-(y-x)^2/2)", [](double x, double y) { return (1.0 + x * y) * std::exp(-0.5 * (y - x) * (y - x)); }},
      {"y^3 exp(-y^2/8)", [](double, double y) { return y * y * y * std::exp(-y * y / 8.0); }},
  };
  const SkewStickyParams q = p.rescaled(c);
  const double rc = std::sqrt(c);
  double worst = 0.0;
  QuadratureSpec spec;
  spec.truncation_radius = 14.0;
  for (double t : {0.25, 1.0, 2.0}) {
    for (double x : {-1.5, -0.3, 0.0, 0.7, 2.0}) {
      for (const auto& test : battery) {
        const double lhs = semigroup_apply(p, c * t, [&](double y) { return test.h(x, y); }, x, {}, spec);
        const double rhs = semigroup_apply(q, t, [&](double y) { return test.h(x, rc * y); }, x / rc, {}, spec);
        const double d = std::fabs(lhs - rhs);
        worst = std::max(worst, d);
        report.add({test.name, t, x, NAN, lhs, rhs, rhs != 0.0 ? lhs / rhs : NAN, d < tol});
      }
    }
  }
  report.fitted["max_abs_discrepancy"] = worst;
  return report;
}

}  // namespace sosbm
