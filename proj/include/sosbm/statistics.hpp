#pragma once

// High-frequency statistics of a sampled path: local-time sums, occupation
// sums, one-sided sums, quadratic variation, and the rescaled mean absolute
// displacement g_hat_n together with its speed-measure integral.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sosbm/kernel.hpp"
#include "sosbm/params.hpp"
#include "sosbm/report.hpp"
#include "sosbm/sampler.hpp"

namespace sosbm {

// ---------------------------------------------------------------------------
// Test functions

/// Bounded integrable g with its one-sided Lebesgue integrals known in closed form.
struct TestFunction {
  std::string id;
  std::function<double(double)> eval;
  double sup_norm = 0.0;
  double integral_pos = 0.0;  // int g_{>0}
  double integral_neg = 0.0;  // int g_{<0}
  double abs_integral = 0.0;  // int |g|
  bool vanishes_at_zero = true;
  std::optional<double> support_radius;

  double operator()(double y) const { return eval(y); }

  /// Checks the declared bound and g(0) flag on a grid; throws on violation.
  void validate() const {
    if (!eval) throw std::invalid_argument("TestFunction " + id + ": no evaluator");
    if (!std::isfinite(abs_integral)) throw std::invalid_argument("TestFunction " + id + ": not integrable");
    if (vanishes_at_zero && eval(0.0) != 0.0)
      throw std::invalid_argument("TestFunction " + id + ": declared g(0) = 0 but it is not");
    for (int k = -4000; k <= 4000; ++k) {
      const double y = k / 400.0;
      if (std::fabs(eval(y)) > sup_norm * (1.0 + 1e-12))
        throw std::invalid_argument("TestFunction " + id + ": exceeds declared sup norm");
    }
  }

  /// Scaled copy c g.
  TestFunction scaled(double c) const {
    TestFunction out = *this;
    auto f = eval;
    out.id = id + "*" + format_double(c);
    out.eval = [f, c](double y) { return c * f(y); };
    out.sup_norm = std::fabs(c) * sup_norm;
    out.integral_pos = c * integral_pos;
    out.integral_neg = c * integral_neg;
    out.abs_integral = std::fabs(c) * abs_integral;
    return out;
  }
};

namespace test_functions {

inline TestFunction zero() {
  return {"zero", [](double) { return 0.0; }, 0.0, 0.0, 0.0, 0.0, true, 0.0};
}

/// (1 - |y|)_+ with the value at 0 removed.
inline TestFunction hat() {
  return {"hat", [](double y) { return y == 0.0 ? 0.0 : std::max(0.0, 1.0 - std::fabs(y)); },
          1.0, 0.5, 0.5, 1.0, true, 1.0};
}

/// Indicator of (0, 1].
inline TestFunction indicator_pos() {
  return {"indicator_pos", [](double y) { return y > 0.0 && y <= 1.0 ? 1.0 : 0.0; },
          1.0, 1.0, 0.0, 1.0, true, 1.0};
}

/// Indicator of [-1, 0); g(0) = 0.
inline TestFunction indicator_neg() {
  return {"indicator_neg", [](double y) { return y >= -1.0 && y < 0.0 ? 1.0 : 0.0; },
          1.0, 0.0, 1.0, 1.0, true, 1.0};
}

/// exp(-y^2 / 2) with the value at 0 removed.
inline TestFunction gauss() {
  const double half = std::sqrt(kPi / 2.0);
  return {"gauss", [](double y) { return y == 0.0 ? 0.0 : std::exp(-0.5 * y * y); },
          1.0, half, half, 2.0 * half, true, std::nullopt};
}

/// exp(-y^2 / 2) including g(0) = 1. Negative control: violates g(0) = 0.
inline TestFunction gauss_full() {
  const double half = std::sqrt(kPi / 2.0);
  return {"gauss_full", [](double y) { return std::exp(-0.5 * y * y); },
          1.0, half, half, 2.0 * half, false, std::nullopt};
}

inline TestFunction by_name(const std::string& id) {
  if (id == "zero") return zero();
  if (id == "hat") return hat();
  if (id == "indicator_pos") return indicator_pos();
  if (id == "indicator_neg") return indicator_neg();
  if (id == "gauss") return gauss();
  if (id == "gauss_full") return gauss_full();
  throw std::invalid_argument("unknown test function '" + id + "'");
}

}  // namespace test_functions

/// m_0(g) = (1 - beta) / sigma_-^2 int g_{<0} + (1 + beta) / sigma_+^2 int g_{>0} + rho g(0).
inline double m0_integral(const SosBmParams& p, const TestFunction& g) {
  return (1.0 - p.beta) / (p.sigma_minus * p.sigma_minus) * g.integral_neg +
         (1.0 + p.beta) / (p.sigma_plus * p.sigma_plus) * g.integral_pos + p.rho * g(0.0);
}

// ---------------------------------------------------------------------------
// Normalizing sequences

struct NormalizingSequence {
  enum class Family { power, log, custom };

  Family family = Family::power;
  double alpha = 0.5;
  std::function<double(double)> custom_fn;
  std::string custom_name;

  static NormalizingSequence power(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("NormalizingSequence::power: alpha must lie in (0, 1)");
    return {Family::power, alpha, {}, {}};
  }
  static NormalizingSequence sqrt() { return power(0.5); }
  static NormalizingSequence log() { return {Family::log, 0.0, {}, {}}; }
  static NormalizingSequence custom(std::function<double(double)> fn, std::string name) {
    NormalizingSequence u{Family::custom, 0.0, std::move(fn), std::move(name)};
    u.check();
    return u;
  }

  double operator()(long n) const {
    const double x = static_cast<double>(n);
    switch (family) {
      case Family::power:
        return alpha == 0.5 ? std::sqrt(x) : std::pow(x, alpha);
      case Family::log:
        return std::log(x);
      case Family::custom:
        return custom_fn(x);
    }
    return NAN;
  }

  std::string name() const {
    switch (family) {
      case Family::power:
        return alpha == 0.5 ? "sqrt" : "power:" + format_double(alpha);
      case Family::log:
        return "log";
      case Family::custom:
        return custom_name.empty() ? "custom" : custom_name;
    }
    return "";
  }

  /// Numerical audit over n = 10^2 .. 10^9: u_n grows without bound and
  /// u_n / n shrinks to 0.
  void check() const {
    double prev_u = 0.0;
    double prev_ratio = INFINITY;
    for (int k = 2; k <= 9; ++k) {
      const long n = static_cast<long>(std::llround(std::pow(10.0, k)));
      const double u = (*this)(n);
      const double ratio = u / static_cast<double>(n);
      if (!std::isfinite(u) || !(u > prev_u) || !(ratio < prev_ratio))
        throw std::invalid_argument("NormalizingSequence " + name() +
                                    ": u_n must increase to infinity with u_n / n decreasing to 0");
      prev_u = u;
      prev_ratio = ratio;
    }
    if (!(prev_ratio < 1e-2))
      throw std::invalid_argument("NormalizingSequence " + name() + ": u_n / n does not vanish");
  }
};

// ---------------------------------------------------------------------------
// Transform functions T with T(0) = 0, T'(0) = 1, eps <= T' <= 1/eps, |T''| <= 1/eps.

struct TransformFunction {
  std::string id;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<double(double)> second_derivative;
  double epsilon = 1.0;
  bool identity = false;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
      throw std::invalid_argument("TransformFunction " + id + ": epsilon must lie in (0, 1]");
    if (value(0.0) != 0.0) throw std::invalid_argument("TransformFunction " + id + ": T(0) != 0");
    if (std::fabs(derivative(0.0) - 1.0) > 1e-12)
      throw std::invalid_argument("TransformFunction " + id + ": T'(0) != 1");
    for (int k = -2000; k <= 2000; ++k) {
      const double y = std::sinh(k / 200.0);  // dense near 0, reaches |y| ~ 1.1e4
      const double d = derivative(y);
      if (d < epsilon || d > 1.0 / epsilon || std::fabs(second_derivative(y)) > 1.0 / epsilon)
        throw std::invalid_argument("TransformFunction " + id + ": ellipticity bounds violated");
    }
  }
};

namespace transforms_catalog {

inline TransformFunction identity() {
  return {"identity", [](double y) { return y; }, [](double) { return 1.0; }, [](double) { return 0.0; },
          1.0, true};
}

/// T(y) = y + y^2 / (2 (1 + |y|)); T' in (1/2, 3/2), T'' = (1 + |y|)^{-3}.
inline TransformFunction soft_quadratic() {
  return {"soft_quadratic",
          [](double y) { return y + y * y / (2.0 * (1.0 + std::fabs(y))); },
          [](double y) {
            const double a = 1.0 + std::fabs(y);
            return 1.0 + y * (2.0 + std::fabs(y)) / (2.0 * a * a);
          },
          [](double y) {
            const double a = 1.0 + std::fabs(y);
            return 1.0 / (a * a * a);
          },
          0.5, false};
}

}  // namespace transforms_catalog

// ---------------------------------------------------------------------------
// Path statistics. A trace holds the value at s = k / n for k = 0..[nt].

struct Trace {
  long n = 1;
  std::vector<double> values;

  double terminal() const { return values.empty() ? 0.0 : values.back(); }
  double time(std::size_t k) const { return static_cast<double>(k) / static_cast<double>(n); }

  void write_csv(std::ostream& os) const {
    os << "i,s,value\n";
    for (std::size_t k = 0; k < values.size(); ++k)
      os << k << ',' << format_double(time(k)) << ',' << format_double(values[k]) << '\n';
  }
};

namespace detail {

// Running sum of f(values[i - 1]) over i = 1..k, scaled by `scale`.
template <class F>
Trace running_sum(const SamplePath& path, double scale, F&& f) {
  Trace out;
  out.n = path.n;
  out.values.assign(path.values.size(), 0.0);
  double sum = 0.0;
  for (std::size_t k = 1; k < path.values.size(); ++k) {
    sum += f(path.values[k - 1]);
    out.values[k] = scale * sum;
  }
  return out;
}

}  // namespace detail

/// s -> (u_n / n) sum_{i=1}^{[ns]} g(u_n X_{(i-1)/n}).
inline Trace local_time_statistic(const SamplePath& path, const TestFunction& g, const NormalizingSequence& u) {
  const double un = u(path.n);
  return detail::running_sum(path, un / static_cast<double>(path.n), [&](double x) { return g(un * x); });
}

/// Same sum with g replaced by g_n[T](y) = g(u_n T(y / u_n)).
inline Trace transformed_statistic(const SamplePath& path, const TestFunction& g, const TransformFunction& T,
                                   const NormalizingSequence& u) {
  if (T.identity) return local_time_statistic(path, g, u);
  const double un = u(path.n);
  return detail::running_sum(path, un / static_cast<double>(path.n), [&](double x) { return g(un * T.value(x)); });
}

/// Interval with independently open or closed ends; lo == hi with both ends
/// closed is a singleton.
struct Interval {
  double lo = -INFINITY;
  double hi = INFINITY;
  bool lo_closed = false;
  bool hi_closed = false;

  static Interval real_line() { return {}; }
  static Interval point(double a) { return {a, a, true, true}; }
  static Interval positive() { return {0.0, INFINITY, false, false}; }
  static Interval negative() { return {-INFINITY, 0.0, false, false}; }
  static Interval open(double a, double b) { return {a, b, false, false}; }
  static Interval closed(double a, double b) { return {a, b, true, true}; }

  bool contains(double x) const {
    const bool above = lo_closed ? x >= lo : x > lo;
    const bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
  }
};

/// s -> (1 / n) #{1 <= i <= [ns] : X_{(i-1)/n} in U}.
inline Trace occupation_statistic(const SamplePath& path, const Interval& U) {
  return detail::running_sum(path, 1.0 / static_cast<double>(path.n),
                             [&](double x) { return U.contains(x) ? 1.0 : 0.0; });
}

/// Terminal one-sided sums S^{g+}, S^{g-} and their raw (unnormalized) sums.
struct OneSidedSums {
  double plus = 0.0;
  double minus = 0.0;
  double raw_plus = 0.0;   // sum g_{>0}(u_n X_{(i-1)/n})
  double raw_minus = 0.0;  // sum g_{<0}(u_n X_{(i-1)/n})
};

inline OneSidedSums one_sided_sums(const SamplePath& path, const TestFunction& g, const NormalizingSequence& u,
                                   double sigma_plus, double sigma_minus) {
  if (g.integral_pos == 0.0 || g.integral_neg == 0.0)
    throw std::domain_error("one_sided_sums: test function " + g.id + " has a zero one-sided integral");
  if (!(sigma_plus > 0.0) || !(sigma_minus > 0.0))
    throw std::invalid_argument("one_sided_sums: volatilities must be positive");
  const double un = u(path.n);
  OneSidedSums out;
  const std::size_t last = path.values.size() - 1;
  for (std::size_t i = 1; i <= last; ++i) {
    const double x = path.values[i - 1];
    if (x > 0.0)
      out.raw_plus += g(un * x);
    else if (x < 0.0)
      out.raw_minus += g(un * x);
  }
  const double scale = un / static_cast<double>(path.n);
  out.plus = scale * sigma_plus * sigma_plus / g.integral_pos * out.raw_plus;
  out.minus = scale * sigma_minus * sigma_minus / g.integral_neg * out.raw_minus;
  return out;
}

struct QuadraticVariation {
  Trace plus;   // sum (X^+_{i/n} - X^+_{(i-1)/n})^2
  Trace minus;  // sum (X^-_{i/n} - X^-_{(i-1)/n})^2
};

inline QuadraticVariation quadratic_variation_sums(const SamplePath& path) {
  QuadraticVariation qv;
  qv.plus.n = qv.minus.n = path.n;
  qv.plus.values.assign(path.values.size(), 0.0);
  qv.minus.values.assign(path.values.size(), 0.0);
  double sp = 0.0;
  double sm = 0.0;
  for (std::size_t i = 1; i < path.values.size(); ++i) {
    const double a = path.values[i - 1];
    const double b = path.values[i];
    const double dp = std::max(b, 0.0) - std::max(a, 0.0);
    const double dm = std::max(-b, 0.0) - std::max(-a, 0.0);
    sp += dp * dp;
    sm += dm * dm;
    qv.plus.values[i] = sp;
    qv.minus.values[i] = sm;
  }
  return qv;
}

// ---------------------------------------------------------------------------
// g_hat_n and the speed-measure integral

/// g_hat_n(y) = E_y |X_1| - |y| under parameters (rho sqrt(n), beta).
inline double g_hat_n(const SkewStickyParams& p, double n, double y, const QuadratureSpec& spec = {}) {
  p.require_non_reflected("g_hat_n");
  if (!(n >= 1.0)) throw std::invalid_argument("g_hat_n: n must be >= 1");
  const SkewStickyParams scaled{p.rho * std::sqrt(n), p.beta};
  return semigroup_apply(scaled, 1.0, [](double z) { return std::fabs(z); }, y, {}, spec) - std::fabs(y);
}

/// g_hat_n tabulated on a geometric grid in |y| on each side of 0, with the
/// exact value at 0 and linear interpolation in between.
class GHatTable {
 public:
  GHatTable(const SkewStickyParams& p, double n, int points_per_side = 800, double radius = 12.0,
            double innermost = 1e-8)
      : p_(p), n_(n), at_zero_(g_hat_n(p, n, 0.0)) {
    const double ratio = std::pow(radius / innermost, 1.0 / (points_per_side - 1));
    double y = innermost;
    for (int k = 0; k < points_per_side; ++k, y *= ratio) grid_.push_back(y);
    for (double g : grid_) {
      pos_.push_back(g_hat_n(p, n, g));
      neg_.push_back(g_hat_n(p, n, -g));
    }
  }

  double operator()(double y) const {
    if (y == 0.0) return at_zero_;
    const auto& side = y > 0.0 ? pos_ : neg_;
    const double a = std::fabs(y);
    if (a >= grid_.back()) return 0.0;  // Gaussian tail beyond the table
    if (a <= grid_.front()) return at_zero_ + (side.front() - at_zero_) * a / grid_.front();
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), a);
    const std::size_t k = static_cast<std::size_t>(it - grid_.begin());
    const double w = (a - grid_[k - 1]) / (grid_[k] - grid_[k - 1]);
    return side[k - 1] + w * (side[k] - side[k - 1]);
  }

  const SkewStickyParams& params() const { return p_; }
  double n() const { return n_; }

 private:
  SkewStickyParams p_;
  double n_;
  double at_zero_;
  std::vector<double> grid_;
  std::vector<double> pos_;
  std::vector<double> neg_;
};

/// s -> (1 / sqrt n) sum_{i=1}^{[ns]} g_hat_n(sqrt(n) X_{(i-1)/n}); a local-time
/// reference that needs no stickiness (skew-sticky paths only).
inline Trace g_hat_local_time(const SamplePath& path, const GHatTable& table) {
  if (table.n() != static_cast<double>(path.n))
    throw std::invalid_argument("g_hat_local_time: table built for a different n");
  const double root_n = std::sqrt(static_cast<double>(path.n));
  return detail::running_sum(path, 1.0 / root_n, [&](double x) { return table(root_n * x); });
}

/// m(h) (gamma = 0, signed) or m^{(gamma)}(h) = int |y|^gamma |h(y)| m(dy).
template <class H>
double speed_measure_integral(const SosBmParams& p, H&& h, double gamma = 0.0, double support_lo = -INFINITY,
                              double support_hi = INFINITY, std::span<const double> breaks = {},
                              const QuadratureSpec& spec = {}) {
  return SpeedMeasure(p).integral(h, gamma, gamma > 0.0, support_lo, support_hi, breaks, spec);
}

template <class H>
double speed_measure_integral(const SkewStickyParams& p, H&& h, double gamma = 0.0, double support_lo = -INFINITY,
                              double support_hi = INFINITY, std::span<const double> breaks = {},
                              const QuadratureSpec& spec = {}) {
  return speed_measure_integral(SosBmParams(p), h, gamma, support_lo, support_hi, breaks, spec);
}

/// m_{(rho sqrt(n), beta)}(g_hat_n) by nested quadrature.
inline double speed_integral_g_hat(const SkewStickyParams& p, double n) {
  QuadratureSpec inner;
  inner.abs_tol = 1e-14;
  inner.rel_tol = 1e-12;
  QuadratureSpec outer;
  outer.abs_tol = 1e-11;
  outer.rel_tol = 1e-10;
  const SkewStickyParams scaled{p.rho * std::sqrt(n), p.beta};
  auto g = [&](double y) { return g_hat_n(p, n, y, inner); };
  // g_hat_n(y) is a Gaussian tail in |y| at unit time.
  const double r = 12.0;
  return speed_measure_integral(scaled, g, 0.0, -r, r, {}, outer);
}

/// Ladder audit of m_{(rho sqrt(n), beta)}(g_hat_n) -> 1.
inline VerificationReport verify_g_hat_mass(const SkewStickyParams& p, const std::vector<double>& ladder,
                                          double final_tol = 0.02) {
  p.require_non_reflected("verify_g_hat_mass");
  if (ladder.empty()) throw std::invalid_argument("verify_g_hat_mass: empty ladder");
  VerificationReport report;
  report.name = "g_hat_mass";
  double prev_gap = INFINITY;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const double n = ladder[k];
    const double value = speed_integral_g_hat(p, n);
    const double gap = std::fabs(value - 1.0);
    bool pass;
    if (p.rho == 0.0) {
      pass = gap < 1e-8;
    } else {
      // Nonincreasing along the ladder, up to quadrature noise.
      pass = gap <= prev_gap + 1e-9;
      if (k + 1 == ladder.size()) pass = pass && gap < final_tol;
    }
    report.add({"m(g_hat_n) n=" + format_double(n), 1.0, NAN, NAN, value, 1.0, value, pass});
    prev_gap = gap;
  }
  return report;
}

}  // namespace sosbm
