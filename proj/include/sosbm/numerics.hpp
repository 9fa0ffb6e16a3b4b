#pragma once

// Scalar special functions, adaptive quadrature and bracketed root finding.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sosbm/detail/erfc_table.hpp"

namespace sosbm {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtPi = 1.77245385090551602730;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

namespace detail {

inline double clenshaw(const double* c, int degree, double u) {
  double b1 = 0.0;
  double b2 = 0.0;
  const double two_u = 2.0 * u;
  for (int k = degree; k >= 1; --k) {
    const double b0 = two_u * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + c[0];
}

// exp(z^2) erfc(z) for z >= 0.
inline double scaled_erfc_nonneg(double z) {
  if (z <= 8.0) {
    for (const auto& piece : kErfcxPieces) {
      if (z <= piece.hi) {
        const double u = (2.0 * z - (piece.lo + piece.hi)) / (piece.hi - piece.lo);
        return clenshaw(piece.coeffs, piece.degree, u);
      }
    }
  }
  const double s = 1.0 / z;
  const double u = 16.0 * s - 1.0;
  return clenshaw(kErfcxTail.data(), static_cast<int>(kErfcxTail.size()) - 1, u) / (z * kSqrtPi);
}

// exp(-z^2) with the square split so the leading part is exact.
inline double exp_neg_square(double z) {
  z = std::fabs(z);
  const double head = std::trunc(z * 16.0) / 16.0;
  const double tail = z - head;
  return std::exp(-head * head) * std::exp(-tail * (z + head));
}

}  // namespace detail

/// Complementary error function.
inline double erfc(double z) {
  if (std::isnan(z)) return z;
  if (z >= 0.0) {
    if (z > 27.3) return 0.0;
    return detail::scaled_erfc_nonneg(z) * detail::exp_neg_square(z);
  }
  return 2.0 - erfc(-z);
}

/// exp(z^2) * erfc(z), evaluated without forming exp(z^2) for z >= 0.
inline double scaled_erfc(double z) {
  if (std::isnan(z)) return z;
  if (z >= 0.0) return detail::scaled_erfc_nonneg(z);
  return 2.0 / detail::exp_neg_square(z) - detail::scaled_erfc_nonneg(-z);
}

inline double normal_cdf(double z) { return 0.5 * erfc(-z / kSqrt2); }
inline double normal_sf(double z) { return 0.5 * erfc(z / kSqrt2); }
inline double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureSpec {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_subdivisions = 4000;
  // Improper integrals are cut at center +/- truncation_radius * scale.
  double truncation_radius = 12.0;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
    if (max_subdivisions < 16)
      throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 16");
    if (!(truncation_radius > 0.0))
      throw std::invalid_argument("QuadratureSpec: truncation_radius must be positive");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  int subdivisions = 0;
};

class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment kronrod21(F& f, double lo, double hi) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto& xk = gauss_kronrod<double, 21>::abscissa();
  const auto& wk = gauss_kronrod<double, 21>::weights();
  const auto& wg = gauss<double, 10>::weights();

  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double kronrod = 0.0;
  double gauss_sum = 0.0;
  const double f0 = f(center);
  kronrod = wk[0] * f0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double dx = half * xk[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += wk[i] * pair;
    // The 10-point Gauss nodes sit at the odd Kronrod positions.
    if (i % 2 == 1) gauss_sum += wg[i / 2] * pair;
  }
  kronrod *= half;
  gauss_sum *= half;
  return Segment{lo, hi, kronrod, std::fabs(kronrod - gauss_sum)};
}

template <class F>
QuadratureResult integrate_finite(F& f, std::vector<double> points, const QuadratureSpec& spec) {
  std::priority_queue<Segment> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    const Segment s = kronrod21(f, points[i], points[i + 1]);
    total += s.value;
    total_err += s.error;
    heap.push(s);
  }
  QuadratureResult out;
  int splits = 0;
  while (!heap.empty() && total_err > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total))) {
    if (splits >= spec.max_subdivisions) {
      out.converged = false;
      break;
    }
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Interval exhausted at double resolution; accept what we have.
      out.converged = total_err <= 1e3 * std::max(spec.abs_tol, spec.rel_tol * std::fabs(total));
      break;
    }
    heap.pop();
    const Segment left = kronrod21(f, worst.lo, mid);
    const Segment right = kronrod21(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }
  // Re-sum to shed the drift of the running update.
  double value = 0.0;
  double err = 0.0;
  std::vector<Segment> segs;
  segs.reserve(heap.size());
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
  for (const auto& s : segs) {
    value += s.value;
    err += s.error;
  }
  out.value = value;
  out.error = err;
  out.subdivisions = splits;
  return out;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (10/21) quadrature over [lo, hi] with declared
/// breakpoints. Infinite bounds are mapped onto a finite interval.
template <class F>
QuadratureResult integrate(F&& f, double lo, double hi, std::span<const double> breakpoints = {},
                           const QuadratureSpec& spec = {}) {
  spec.validate();
  if (std::isnan(lo) || std::isnan(hi)) throw std::invalid_argument("integrate: NaN bound");
  if (lo == hi) return {};
  if (lo > hi) {
    auto r = integrate(f, hi, lo, breakpoints, spec);
    r.value = -r.value;
    return r;
  }

  std::vector<double> pts;
  pts.push_back(lo);
  for (double b : breakpoints)
    if (b > lo && b < hi) pts.push_back(b);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  if (!lo_inf && !hi_inf) return detail::integrate_finite(f, std::move(pts), spec);

  // x = u / (1 - u^2) maps (-1, 1) onto the real line monotonically.
  auto to_u = [](double x) {
    if (std::isinf(x)) return x > 0 ? 1.0 : -1.0;
    if (x == 0.0) return 0.0;
    return 2.0 * x / (1.0 + std::sqrt(1.0 + 4.0 * x * x));
  };
  auto g = [&f](double u) {
    const double d = 1.0 - u * u;
    if (d <= 0.0) return 0.0;
    const double x = u / d;
    const double v = f(x) * (1.0 + u * u) / (d * d);
    return std::isfinite(v) ? v : 0.0;
  };
  for (double& p : pts) p = to_u(p);
  return detail::integrate_finite(g, std::move(pts), spec);
}

/// Integral of a Gaussian-dominated integrand over the real line, truncated at
/// center +/- spec.truncation_radius * scale.
template <class F>
QuadratureResult integrate_truncated(F&& f, double center, double scale,
                                     std::span<const double> breakpoints = {},
                                     const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(scale > 0.0)) throw std::invalid_argument("integrate_truncated: scale must be positive");
  const double r = spec.truncation_radius * scale;
  return integrate(f, center - r, center + r, breakpoints, spec);
}

/// Integral that must converge; throws QuadratureError otherwise.
inline double require(const QuadratureResult& r, const char* what) {
  if (!r.converged)
    throw QuadratureError(std::string(what) + ": quadrature did not converge (error estimate " +
                          std::to_string(r.error) + ")");
  return r.value;
}

// ---------------------------------------------------------------------------
// Root finding

/// Brent's method on a bracket [lo, hi] with f(lo) * f(hi) <= 0.
template <class F>
double find_root(F&& f, double lo, double hi, double tol = 1e-12, int max_iter = 200) {
  if (!(tol > 0.0)) throw std::invalid_argument("find_root: tol must be positive");
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw std::invalid_argument("find_root: bracket does not straddle a root");

  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * tol;
    const double m = 0.5 * (c - b);
    if (std::fabs(m) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0)
        q = -q;
      else
        p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::fabs(tol1 * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::fabs(d) > tol1 ? d : (m > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  return b;
}

}  // namespace sosbm
