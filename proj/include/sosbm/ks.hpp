#pragma once

// One-sample Kolmogorov-Smirnov statistic against a distribution that may
// carry atoms (ties are compared against both one-sided limits of the CDF).

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace sosbm {

struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;  // asymptotic critical value at the requested level
  std::size_t samples = 0;
  bool pass() const { return statistic <= threshold; }
};

/// Asymptotic KS critical value c(alpha) / sqrt(N); alpha in {0.10, 0.05, 0.01, 0.001}.
inline double ks_critical_value(std::size_t n, double alpha = 0.01) {
  double c;
  if (alpha >= 0.10)
    c = 1.224;
  else if (alpha >= 0.05)
    c = 1.358;
  else if (alpha >= 0.01)
    c = 1.628;
  else
    c = 1.949;
  return c / std::sqrt(static_cast<double>(n));
}

/// cdf(y) = P(X <= y), cdf_left(y) = P(X < y).
template <class Cdf, class CdfLeft>
KsResult ks_test(std::vector<double> samples, Cdf&& cdf, CdfLeft&& cdf_left, double alpha = 0.01) {
  if (samples.empty()) throw std::invalid_argument("ks_test: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double v = samples[i];
    d = std::max(d, std::fabs(static_cast<double>(i) / n - cdf_left(v)));
    d = std::max(d, std::fabs(static_cast<double>(j) / n - cdf(v)));
    i = j;
  }
  return {d, ks_critical_value(samples.size(), alpha), samples.size()};
}

}  // namespace sosbm
