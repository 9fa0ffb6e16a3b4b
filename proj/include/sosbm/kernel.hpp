#pragma once

// Transition kernel of the skew-sticky Brownian motion with respect to its
// speed measure m = a(y) dy + rho delta_0:
//
//   p(t, x, y) = (u1 - u2)(t, x, y) / a(y) + v_rho(t, x, y)
//
// with u1 the Gaussian kernel, u2(t, x, y) = u1(t, |x|, -|y|) and v_rho the
// sticky correction (v_0 = u2).

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "sosbm/errors.hpp"
#include "sosbm/numerics.hpp"
#include "sosbm/params.hpp"

namespace sosbm {

namespace detail {

/// Gaussian density of N(0, t) at z.
inline double heat(double t, double z) { return std::exp(-z * z / (2.0 * t)) / std::sqrt(2.0 * kPi * t); }

/// rho * v_rho(t, w) for w = |x| + |y| >= 0 and rho > 0, i.e.
/// exp(2w/rho + 2t/rho^2) erfc(w / sqrt(2t) + sqrt(2t) / rho), formed through
/// the scaled erfc so that no exponential overflows.
inline double sticky_mass(double rho, double t, double w) {
  const double s2t = std::sqrt(2.0 * t);
  return std::exp(-w * w / (2.0 * t)) * scaled_erfc(w / s2t + s2t / rho);
}

}  // namespace detail

inline double u1(double t, double x, double y) {
  require_positive_time(t, "u1");
  return detail::heat(t, x - y);
}

inline double u2(double t, double x, double y) {
  require_positive_time(t, "u2");
  return detail::heat(t, std::fabs(x) + std::fabs(y));
}

/// Sticky factor v_rho; v_0 = u2.
inline double v_rho(double rho, double t, double x, double y) {
  require_positive_time(t, "v_rho");
  if (!(rho >= 0.0)) throw std::invalid_argument("v_rho: rho must be >= 0");
  const double w = std::fabs(x) + std::fabs(y);
  if (rho == 0.0) return detail::heat(t, w);
  return detail::sticky_mass(rho, t, w) / rho;
}

inline double v_rho(const SkewStickyParams& p, double t, double x, double y) {
  return v_rho(p.rho, t, x, y);
}

/// Transition density with respect to the speed measure m_{(rho, beta)}.
inline double transition_density(const SkewStickyParams& p, double t, double x, double y) {
  require_positive_time(t, "transition_density");
  p.require_non_reflected("transition_density");
  const double v = v_rho(p.rho, t, x, y);
  if (x * y <= 0.0) {
    // u1 == u2 whenever |x - y| = |x| + |y|.
    return v;
  }
  const double killed = detail::heat(t, x - y) - detail::heat(t, std::fabs(x) + std::fabs(y));
  return killed / p.skew_weight(y) + v;
}

/// Lebesgue density of the absolutely continuous part of the law of X_t:
/// a(y) p(t, x, y) for y != 0.
inline double continuous_density(const SkewStickyParams& p, double t, double x, double y) {
  return p.skew_weight(y) * transition_density(p, t, x, y);
}

/// P_x(X_t = 0) = rho p(t, x, 0) = rho v_rho(t, x, 0).
inline double atom_probability(const SkewStickyParams& p, double t, double x) {
  require_positive_time(t, "atom_probability");
  if (p.rho == 0.0) return 0.0;
  return detail::sticky_mass(p.rho, t, std::fabs(x));
}

namespace detail {

// Radial integrals int_0^r f(|x| + s) ds for the two radial kernel pieces.
struct RadialPieces {
  double t;
  double c;  // |x|
  double rho;

  double tail_u2(double r) const {  // int_r^inf heat(t, c + s) ds
    return normal_sf((c + r) / std::sqrt(t));
  }
  double tail_v(double r) const {  // int_r^inf v_rho(t, c + s) ds
    if (rho == 0.0) return tail_u2(r);
    return normal_sf((c + r) / std::sqrt(t)) - 0.5 * sticky_mass(rho, t, c + r);
  }
};

// int_{-inf}^{y} w(z) f(c + |z|) dz with weight w = w_neg on z < 0, w_pos on z > 0,
// given the radial tail function.
template <class Tail>
double radial_cdf(double y, double w_neg, double w_pos, Tail&& tail) {
  if (y < 0.0) return w_neg * tail(-y);
  const double half = tail(0.0);
  return w_neg * half + w_pos * (half - tail(y));
}

}  // namespace detail

/// Mass of the absolutely continuous part on (-inf, y], excluding the atom.
inline double continuous_cdf(const SkewStickyParams& p, double t, double x, double y) {
  require_positive_time(t, "transition_cdf");
  p.require_non_reflected("transition_cdf");
  if (y == INFINITY) return 1.0 - atom_probability(p, t, x);
  if (y == -INFINITY) return 0.0;
  const detail::RadialPieces pieces{t, std::fabs(x), p.rho};
  const double gauss = normal_cdf((y - x) / std::sqrt(t));
  const double killed_u2 = detail::radial_cdf(y, 1.0, 1.0, [&](double r) { return pieces.tail_u2(r); });
  const double sticky =
      detail::radial_cdf(y, 1.0 - p.beta, 1.0 + p.beta, [&](double r) { return pieces.tail_v(r); });
  return gauss - killed_u2 + sticky;
}

/// P_x(X_t <= y), including the atom at 0 when y >= 0.
inline double transition_cdf(const SkewStickyParams& p, double t, double x, double y) {
  double value = continuous_cdf(p, t, x, y);
  if (y >= 0.0) value += atom_probability(p, t, x);
  return std::clamp(value, 0.0, 1.0);
}

/// P_x(X_t < y).
inline double transition_cdf_left(const SkewStickyParams& p, double t, double x, double y) {
  double value = continuous_cdf(p, t, x, y);
  if (y > 0.0) value += atom_probability(p, t, x);
  return std::clamp(value, 0.0, 1.0);
}

/// Generalized inverse of transition_cdf. Levels inside the atom's jump map
/// to exactly 0.0.
inline double transition_quantile(const SkewStickyParams& p, double t, double x, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("transition_quantile: u must lie in (0, 1)");
  const double below = continuous_cdf(p, t, x, 0.0);
  const double atom = atom_probability(p, t, x);
  if (atom > 0.0 && u >= below && u <= below + atom) return 0.0;

  const double scale = std::sqrt(t);
  auto f = [&](double y) { return transition_cdf(p, t, x, y) - u; };
  double lo;
  double hi;
  if (u < below) {
    hi = 0.0;
    lo = std::min(x, 0.0) - scale;
    while (f(lo) > 0.0) lo -= 2.0 * (hi - lo);
  } else {
    lo = 0.0;
    hi = std::max(x, 0.0) + scale;
    while (f(hi) < 0.0) hi += 2.0 * (hi - lo);
  }
  const double root = find_root(f, lo, hi, 1e-14 * std::max(1.0, std::fabs(x) + scale));
  // The atom owns the value 0; the continuous part never returns it.
  if (root == 0.0) return u < below ? -std::numeric_limits<double>::denorm_min()
                                    : std::numeric_limits<double>::denorm_min();
  return root;
}

/// Domain over which kernel integrals in y are carried out: the kernel is
/// Gaussian-dominated around x and around 0.
inline std::pair<double, double> kernel_domain(double t, double x, double radius) {
  const double r = radius * std::sqrt(t);
  return {std::min(x, 0.0) - r, std::max(x, 0.0) + r};
}

/// P_t h(x) = rho h(0) p(t, x, 0) + int h(y) p(t, x, y) m_{(0, beta)}(dy).
template <class H>
double semigroup_apply(const SkewStickyParams& p, double t, H&& h, double x,
                       std::span<const double> breaks = {}, const QuadratureSpec& spec = {}) {
  require_positive_time(t, "semigroup_apply");
  p.require_non_reflected("semigroup_apply");
  const auto [lo, hi] = kernel_domain(t, x, spec.truncation_radius);
  std::vector<double> pts(breaks.begin(), breaks.end());
  pts.push_back(0.0);
  pts.push_back(x);
  auto integrand = [&](double y) {
    if (y == 0.0) return 0.0;
    const double hy = h(y);
    if (hy == 0.0) return 0.0;
    return hy * continuous_density(p, t, x, y);
  };
  double value = require(integrate(integrand, lo, hi, pts, spec), "semigroup_apply");
  if (p.rho > 0.0) value += h(0.0) * atom_probability(p, t, x);
  return value;
}

/// x -> P_t h(x) as a callable.
template <class H>
std::function<double(double)> semigroup(const SkewStickyParams& p, double t, H h,
                                        std::vector<double> breaks = {}, QuadratureSpec spec = {}) {
  return [=](double x) { return semigroup_apply(p, t, h, x, breaks, spec); };
}

/// Aggregate semigroup action sum_{i=2}^{[nt]} P^{(rho sqrt(n), beta)}_{i-1} h(sqrt(n) x).
template <class H>
double gamma_n(const SkewStickyParams& p, H&& h, long n, double t, double x,
               std::span<const double> breaks = {}, const QuadratureSpec& spec = {}) {
  if (n < 1) throw std::invalid_argument("gamma_n: n must be >= 1");
  require_positive_time(t, "gamma_n");
  const double root_n = std::sqrt(static_cast<double>(n));
  const SkewStickyParams scaled{p.rho * root_n, p.beta};
  const long last = static_cast<long>(std::floor(static_cast<double>(n) * t));
  double sum = 0.0;
  for (long i = 2; i <= last; ++i)
    sum += semigroup_apply(scaled, static_cast<double>(i - 1), h, root_n * x, breaks, spec);
  return sum;
}

// ---------------------------------------------------------------------------
// Joint law of (X_t, L_t, O^+_t), O^+ the occupation time of [0, inf).

struct JointLawPoint {
  double y = 0.0;           // terminal value
  double local_time = 0.0;  // symmetric local time at 0
  double occupation = 0.0;  // time spent in [0, inf)
};

namespace detail {

/// First-passage density of level |z| at time s.
inline double passage(double s, double z) {
  if (!(s > 0.0)) return 0.0;
  const double az = std::fabs(z);
  return az / std::sqrt(2.0 * kPi * s * s * s) * std::exp(-az * az / (2.0 * s));
}

}  // namespace detail

/// Weight splitting the local time between the positive and negative sides.
inline double joint_law_weight(const SkewStickyParams& p) { return 0.5 * (1.0 + p.beta); }

/// Density of (X_t, L_t, O^+_t) on {L_t > 0} with respect to m(dy) dl do.
/// At y = 0 this is the density against the atom rho delta_0(dy).
inline double joint_density(const SkewStickyParams& p, double t, double x, const JointLawPoint& pt) {
  require_positive_time(t, "joint_density");
  p.require_non_reflected("joint_density");
  const double l = pt.local_time;
  const double o = pt.occupation;
  if (!(l > 0.0) || !(o > p.rho * l) || !(o < t)) return 0.0;
  const double a = joint_law_weight(p);
  const double xp = std::max(x, 0.0);
  const double xm = std::max(-x, 0.0);
  const double yp = std::max(pt.y, 0.0);
  const double ym = std::max(-pt.y, 0.0);
  return detail::passage(o - p.rho * l, a * l + xp + yp) * detail::passage(t - o, (1.0 - a) * l + xm + ym);
}

/// Lebesgue density in y of the paths that never reach 0 on [0, t]
/// (L_t = 0, O^+_t = t if x > 0 and 0 if x < 0).
inline double joint_singular_density(double t, double x, double y) {
  require_positive_time(t, "joint_singular_density");
  if (x * y <= 0.0) return 0.0;
  return detail::heat(t, x - y) - detail::heat(t, std::fabs(x) + std::fabs(y));
}

}  // namespace sosbm
