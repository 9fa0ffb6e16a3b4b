#pragma once

// Piecewise-linear and integral space transforms between members of the SOS
// family, the induced parameter map, and the local-time conversion factor.

#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sosbm/kernel.hpp"
#include "sosbm/ks.hpp"
#include "sosbm/parallel.hpp"
#include "sosbm/report.hpp"
#include "sosbm/sampler.hpp"

namespace sosbm {

class NonEllipticError : public std::domain_error {
 public:
  explicit NonEllipticError(const std::string& what) : std::domain_error(what) {}
};

class NonInvertibleError : public std::domain_error {
 public:
  explicit NonInvertibleError(const std::string& what) : std::domain_error(what) {}
};

/// T1(x) = x / sigma_0(x).
inline double t1(const SosBmParams& p, double x) { return x / p.sigma0(x); }

inline double t1_inverse(const SosBmParams& p, double y) { return y * p.sigma0(y); }

/// T2(x) = int_0^x sigma_0(y) / sigma(y) dy, where sigma_0 takes the one-sided
/// limits of sigma at 0.
inline double t2(const std::function<double(double)>& sigma, double sigma_minus0, double sigma_plus0, double x,
                 const QuadratureSpec& spec = {}) {
  if (!(sigma_minus0 > 0.0) || !(sigma_plus0 > 0.0))
    throw NonEllipticError("t2: one-sided limits of sigma at 0 must be positive");
  if (x == 0.0) return 0.0;
  // Adaptive quadrature happily "converges" on 1/y, so ellipticity is probed
  // directly: geometrically towards 0 and on a uniform grid over the range.
  const double floor = 1e-8 * std::min(sigma_minus0, sigma_plus0);
  auto check = [&](double y) {
    const double s = sigma(y);
    if (!(s >= floor) || !std::isfinite(s)) throw NonEllipticError("t2: sigma is not bounded away from 0 on the range");
  };
  for (int k = 1; k <= 15; ++k) check(x * std::pow(10.0, -k));
  for (int k = 1; k <= 256; ++k) check(x * k / 256.0);
  auto integrand = [&](double y) {
    const double s = sigma(y);
    if (!(s > 0.0) || !std::isfinite(s)) throw NonEllipticError("t2: sigma is not positive on the range");
    return (y > 0.0 ? sigma_plus0 : sigma_minus0) / s;
  };
  const double zero[] = {0.0};
  return require(integrate(integrand, 0.0, x, zero, spec), "t2");
}

/// Skew-sticky parameters of T1(X) for an SOS-BM X, and the factor c with
/// L^0(T1(X)) = c L^0(X).
struct ParamMap {
  SosBmParams source;
  SkewStickyParams target;
  double local_time_factor = 1.0;
};

/// L^0(f(X)) = ((f'(0+) - f'(0-)) beta + f'(0+) + f'(0-)) / 2 * L^0(X) for an
/// increasing f with f(0) = 0 and one-sided derivatives at 0.
inline double local_time_factor(double derivative_minus, double derivative_plus, double beta) {
  if (!(derivative_minus > 0.0) || !(derivative_plus > 0.0) || !std::isfinite(derivative_minus) ||
      !std::isfinite(derivative_plus))
    throw NonInvertibleError("local_time_factor: one-sided derivatives must be finite and positive");
  if (!(beta >= -1.0 && beta <= 1.0)) throw std::invalid_argument("local_time_factor: beta must lie in [-1, 1]");
  return ((derivative_plus - derivative_minus) * beta + derivative_plus + derivative_minus) / 2.0;
}

inline ParamMap map_params(const SosBmParams& p) {
  const double sm = p.sigma_minus;
  const double sp = p.sigma_plus;
  const double d = sm * (1.0 + p.beta) + sp * (1.0 - p.beta);
  ParamMap out;
  out.source = p;
  out.target = SkewStickyParams{p.rho * 2.0 * sm * sp / d, (sm * (1.0 + p.beta) - sp * (1.0 - p.beta)) / d};
  out.local_time_factor = local_time_factor(1.0 / sm, 1.0 / sp, p.beta);
  return out;
}

/// SOS-BM with volatilities (sigma_minus, sigma_plus) whose T1 image is the
/// given skew-sticky process.
inline SosBmParams unmap_params(const SkewStickyParams& target, double sigma_minus, double sigma_plus) {
  const double a = sigma_plus * (1.0 + target.beta);
  const double b = sigma_minus * (1.0 - target.beta);
  const double beta = (a - b) / (a + b);
  const double d = sigma_minus * (1.0 + beta) + sigma_plus * (1.0 - beta);
  return SosBmParams{target.rho * d / (2.0 * sigma_minus * sigma_plus), beta, sigma_minus, sigma_plus};
}

struct ReductionReport {
  SosBmParams source;
  SkewStickyParams target;
  KsResult ks;
  bool zero_set_preserved = true;
  long zero_count = 0;  // over all paths and grid points

  bool pass() const { return ks.pass() && zero_set_preserved; }

  static void write_csv_header(std::ostream& os) {
    os << "rho,beta,sigma_minus,sigma_plus,target_rho,target_beta,ks_statistic,ks_threshold,zero_set_preserved,pass\n";
  }
  void write_csv_row(std::ostream& os) const {
    os << format_double(source.rho) << ',' << format_double(source.beta) << ',' << format_double(source.sigma_minus)
       << ',' << format_double(source.sigma_plus) << ',' << format_double(target.rho) << ','
       << format_double(target.beta) << ',' << format_double(ks.statistic) << ',' << format_double(ks.threshold)
       << ',' << (zero_set_preserved ? "true" : "false") << ',' << (pass() ? "true" : "false") << '\n';
  }
};

/// Simulates `paths` SOS-BM paths from 0 on the grid 1/n up to t, maps them by
/// T1 and tests the time-t marginal against the kernel of the mapped
/// parameters. Path i uses stream (seed, i).
inline ReductionReport verify_reduction(const SosBmParams& source, long n, double t, std::size_t paths,
                                        std::uint64_t seed, unsigned jobs = 0, double x = 0.0,
                                        double alpha = 0.01) {
  source.skew_sticky().require_non_reflected("verify_reduction");
  if (paths == 0) throw std::invalid_argument("verify_reduction: need at least one path");
  const ParamMap map = map_params(source);
  const double y0 = t1(source, x);
  std::vector<double> ends(paths);
  std::vector<long> zeros(paths, 0);
  std::vector<char> preserved(paths, 1);
  parallel_for(paths, jobs, [&](std::size_t i) {
    RngStream rng(seed, i);
    const SamplePath path = simulate_path(source, x, n, t, rng);
    for (double v : path.values) {
      const double y = t1(source, v);
      if ((v == 0.0) != (y == 0.0)) preserved[i] = 0;
      if (v == 0.0) ++zeros[i];
    }
    ends[i] = t1(source, path.values.back());
  });
  ReductionReport r;
  r.source = source;
  r.target = map.target;
  const double horizon = static_cast<double>(grid_steps(n, t)) / static_cast<double>(n);
  r.ks = ks_test(
      ends, [&](double y) { return transition_cdf(map.target, horizon, y0, y); },
      [&](double y) { return transition_cdf_left(map.target, horizon, y0, y); }, alpha);
  for (std::size_t i = 0; i < paths; ++i) {
    r.zero_count += zeros[i];
    if (!preserved[i]) r.zero_set_preserved = false;
  }
  return r;
}

}  // namespace sosbm
