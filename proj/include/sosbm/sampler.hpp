#pragma once

// Exact grid simulation of SkS-BM and SOS-BM by chaining draws from the
// transition kernel. Atom draws return the bit-exact value 0.0.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sosbm/kernel.hpp"
#include "sosbm/rng.hpp"
#include "sosbm/scale_speed.hpp"

namespace sosbm {

/// Number of grid steps [n t].
inline long grid_steps(long n, double t) {
  if (n < 1) throw std::invalid_argument("grid_steps: n must be >= 1");
  require_positive_time(t, "grid_steps");
  return static_cast<long>(std::floor(static_cast<double>(n) * t + 1e-9));
}

namespace detail {

// Standard normal conditioned on Z > a, a >= 0.
inline double normal_tail(double a, RngStream& rng) {
  if (a < 1.0) {
    for (;;) {
      const double z = std::fabs(rng.normal());
      if (z > a) return z;
    }
  }
  for (;;) {
    const double z = std::sqrt(a * a - 2.0 * std::log(rng.uniform()));
    if (rng.uniform() * z < a) return z;
  }
}

// Density proportional to u1 - u2 on the side of x (Brownian motion killed at 0).
inline double sample_killed(double dt, double x, RngStream& rng) {
  const double sd = std::sqrt(dt);
  for (;;) {
    const double y = x + sd * rng.normal();
    if (x * y <= 0.0) continue;
    if (rng.uniform() < -std::expm1(-2.0 * x * y / dt)) return y;
  }
}

// Density proportional to a(y) v_rho(t, x, y). With w = |x| + |y| and
// v_rho(w) = E[heat(t, w + S)], S ~ Exp(2 / rho), the pair
// (r = |y|, S) has density (2/rho) e^{-2S/rho} heat(t, c + r + S). We draw
// W = r + S from heat(t, c + W)(1 - e^{-2W/rho}) and then S | W.
inline double sample_sticky_part(const SkewStickyParams& p, double dt, double c, RngStream& rng) {
  const double sd = std::sqrt(dt);
  const double sign = rng.uniform() < 0.5 * (1.0 + p.beta) ? 1.0 : -1.0;
  if (p.rho == 0.0) {
    for (;;) {
      const double r = sd * normal_tail(c / sd, rng) - c;
      if (r > 0.0) return sign * r;
    }
  }
  const double lambda = 2.0 / p.rho;
  const double tail_mass = normal_sf(c / sd);
  // Envelope masses of the two proposals; pick the tighter one.
  const double gaussian_env = tail_mass;
  const double rayleigh_env = lambda * dt * detail::heat(dt, c);
  const bool use_gaussian = gaussian_env <= rayleigh_env;
  for (;;) {
    double z;
    double accept;
    if (use_gaussian) {
      z = sd * normal_tail(c / sd, rng);
      accept = -std::expm1(-lambda * (z - c));
    } else {
      z = std::sqrt(c * c - 2.0 * dt * std::log(rng.uniform()));
      accept = -std::expm1(-lambda * (z - c)) / (lambda * z);
    }
    if (!(rng.uniform() < accept)) continue;
    const double w = z - c;
    const double s = -std::log1p(rng.uniform() * std::expm1(-lambda * w)) / lambda;
    const double r = w - s;
    if (r > 0.0) return sign * r;
  }
}

}  // namespace detail

/// One exact draw of X_{dt} given X_0 = x. Returns exactly 0.0 with
/// probability atom_probability(p, dt, x).
inline double sample_transition(const SkewStickyParams& p, double dt, double x, RngStream& rng) {
  require_positive_time(dt, "sample_transition");
  p.require_non_reflected("sample_transition");
  const double c = std::fabs(x);
  const double atom = atom_probability(p, dt, x);
  const double killed = c > 0.0 ? 1.0 - erfc(c / (kSqrt2 * std::sqrt(dt))) : 0.0;
  const double u = rng.uniform();
  if (u < atom) return 0.0;
  if (u < atom + killed) return detail::sample_killed(dt, x, rng);
  return detail::sample_sticky_part(p, dt, c, rng);
}

/// Envelope constant for Gaussian-proposal rejection: sup_y a(y) p / u1 is
/// 1 + |beta|, taken with 10% headroom.
inline double rejection_envelope(const SkewStickyParams& p) { return 1.1 * (1.0 + std::fabs(p.beta)); }

/// Same law as sample_transition, drawn by rejection from N(x, dt) against
/// the continuous part, falling back to CDF inversion when the acceptance
/// rate (1 - atom) / envelope drops below 5%.
inline double sample_transition_rejection(const SkewStickyParams& p, double dt, double x, RngStream& rng,
                                          double envelope = 0.0) {
  require_positive_time(dt, "sample_transition_rejection");
  p.require_non_reflected("sample_transition_rejection");
  if (envelope <= 0.0) envelope = rejection_envelope(p);
  const double atom = atom_probability(p, dt, x);
  if (rng.uniform() < atom) return 0.0;
  if ((1.0 - atom) / envelope < 0.05) {
    const double below = continuous_cdf(p, dt, x, 0.0);
    for (;;) {
      const double v = rng.uniform() * (1.0 - atom);
      const double level = v < below ? v : v + atom;
      if (!(level > 0.0 && level < 1.0)) continue;
      const double y = transition_quantile(p, dt, x, level);
      if (y != 0.0) return y;
    }
  }
  const double sd = std::sqrt(dt);
  for (;;) {
    const double y = x + sd * rng.normal();
    if (y == 0.0) continue;
    const double ratio = continuous_density(p, dt, x, y) / u1(dt, x, y);
    if (rng.uniform() * envelope < ratio) return y;
  }
}

/// Equally spaced observations X_{i/n}, i = 0..[nt].
struct SamplePath {
  SosBmParams params;
  bool reflected = false;  // |Y| of a skew-sticky Y (sticky-reflected BM)
  long n = 1;
  double horizon = 1.0;
  double start = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> values;

  long steps() const { return static_cast<long>(values.size()) - 1; }
  double time(long i) const { return static_cast<double>(i) / static_cast<double>(n); }
};

/// Exact SkS-BM path on the grid {i / n}.
inline SamplePath simulate_path(const SkewStickyParams& p, double x, long n, double t, RngStream& rng) {
  const long steps = grid_steps(n, t);
  p.require_non_reflected("simulate_path");
  SamplePath path;
  path.params = SosBmParams(p);
  path.n = n;
  path.horizon = t;
  path.start = x;
  path.seed = rng.seed();
  path.stream = rng.stream();
  path.values.resize(static_cast<std::size_t>(steps) + 1);
  path.values[0] = x;
  const double dt = 1.0 / static_cast<double>(n);
  for (long i = 1; i <= steps; ++i)
    path.values[static_cast<std::size_t>(i)] = sample_transition(p, dt, path.values[static_cast<std::size_t>(i - 1)], rng);
  return path;
}

/// Exact SOS-BM path: X = sigma_0(Y) Y for the skew-sticky image Y of X
/// under x -> x / sigma_0(x).
inline SamplePath simulate_path(const SosBmParams& p, double x, long n, double t, RngStream& rng) {
  if (p.is_skew_sticky()) return simulate_path(p.skew_sticky(), x, n, t, rng);
  const SkewStickyParams image = skew_sticky_image(p);
  SamplePath path = simulate_path(image, x / p.sigma0(x), n, t, rng);
  for (double& v : path.values) v *= p.sigma0(v);
  path.values[0] = x;
  path.params = p;
  path.start = x;
  return path;
}

/// Observations of the same path on the coarser grid {i / (n / factor)}.
/// Exact in law, since the fine grid is exact.
inline SamplePath subsample(const SamplePath& path, long factor) {
  if (factor < 1 || path.n % factor != 0)
    throw std::invalid_argument("subsample: factor must divide n");
  SamplePath out = path;
  out.n = path.n / factor;
  out.values.clear();
  for (std::size_t i = 0; i < path.values.size(); i += static_cast<std::size_t>(factor))
    out.values.push_back(path.values[i]);
  return out;
}

/// Sticky-reflected BM as |Y| for Y a (rho, 0) SkS-BM started at x >= 0.
inline SamplePath sample_reflected(double rho, double x, long n, double t, RngStream& rng) {
  if (!(x >= 0.0)) throw std::invalid_argument("sample_reflected: start must be >= 0");
  SamplePath path = simulate_path(SkewStickyParams{rho, 0.0}, x, n, t, rng);
  for (double& v : path.values) v = std::fabs(v);
  path.params = SosBmParams{rho, 1.0, 1.0, 1.0};
  path.reflected = true;
  return path;
}

/// Occupation-based local time: (1 / rho) (1 / n) #{i < k : X_{i/n} = 0} for
/// k = 0..[nt]. Undefined for rho = 0.
inline std::vector<double> reference_local_time(const SamplePath& path) {
  const double rho = path.params.rho;
  if (!(rho > 0.0))
    throw std::domain_error("reference_local_time: undefined for zero stickiness");
  std::vector<double> trace(path.values.size(), 0.0);
  long zeros = 0;
  const double scale = 1.0 / (rho * static_cast<double>(path.n));
  for (std::size_t k = 1; k < path.values.size(); ++k) {
    if (path.values[k - 1] == 0.0) ++zeros;
    trace[k] = static_cast<double>(zeros) * scale;
  }
  return trace;
}

}  // namespace sosbm
