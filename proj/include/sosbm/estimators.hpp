#pragma once

// Conditional estimators of stickiness, skewness and the one-sided
// volatilities from a path sampled on the grid {i / n}.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>

#include "sosbm/statistics.hpp"

namespace sosbm {

struct EstimateDiagnostics {
  long zero_count = 0;             // #{1 <= i <= [nt] : X_{(i-1)/n} = 0}
  double s_plus = NAN;
  double s_minus = NAN;
  double qv_plus = NAN;
  double qv_minus = NAN;
  double occupation_plus = NAN;    // (1/n) #{X_{(i-1)/n} > 0}
  double occupation_minus = NAN;   // (1/n) #{X_{(i-1)/n} < 0}
  std::optional<double> beta_raw;  // before clamping to [-1, 1]
  std::string note;
};

struct EstimateReport {
  std::optional<double> rho_hat;
  std::optional<double> beta_hat;
  std::optional<double> sigma_plus_hat;
  std::optional<double> sigma_minus_hat;
  // Conditioning events, detected on the sampled values X_0 .. X_{[nt]/n}.
  bool hit_zero = false;
  bool hit_positive = false;
  bool hit_negative = false;
  long n = 0;
  double t = 0.0;
  EstimateDiagnostics diagnostics;

  static void write_csv_header(std::ostream& os) {
    os << "n,t,hit_zero,hit_positive,hit_negative,rho_hat,beta_hat,sigma_minus_hat,sigma_plus_hat,"
          "zero_count,s_plus,s_minus,qv_plus,qv_minus,occupation_plus,occupation_minus,beta_raw,note\n";
  }

  void write_csv_row(std::ostream& os) const {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    auto num = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
    const auto& d = diagnostics;
    os << n << ',' << format_double(t) << ',' << hit_zero << ',' << hit_positive << ',' << hit_negative << ','
       << opt(rho_hat) << ',' << opt(beta_hat) << ',' << opt(sigma_minus_hat) << ',' << opt(sigma_plus_hat) << ','
       << d.zero_count << ',' << num(d.s_plus) << ',' << num(d.s_minus) << ',' << num(d.qv_plus) << ','
       << num(d.qv_minus) << ',' << num(d.occupation_plus) << ',' << num(d.occupation_minus) << ','
       << opt(d.beta_raw) << ',' << d.note << '\n';
  }
};

namespace detail {

inline void detect_events(const SamplePath& path, EstimateReport& r) {
  r.n = path.n;
  r.t = path.time(path.steps());
  for (double x : path.values) {
    if (x == 0.0) r.hit_zero = true;
    if (x > 0.0) r.hit_positive = true;
    if (x < 0.0) r.hit_negative = true;
  }
}

inline void append_note(EstimateDiagnostics& d, const std::string& s) {
  d.note += d.note.empty() ? s : "; " + s;
}

}  // namespace detail

/// rho_hat = (2/n) #zeros / (S+ + S-), beta_hat = (S+ - S-) / (S+ + S-),
/// reported only when the sampled path visited 0.
inline EstimateReport estimate_rho_beta(const SamplePath& path, const TestFunction& g,
                                        const NormalizingSequence& u, double sigma_plus, double sigma_minus) {
  if (g(0.0) != 0.0) throw std::invalid_argument("estimate_rho_beta: test function must vanish at 0");
  EstimateReport r;
  detail::detect_events(path, r);
  const OneSidedSums s = one_sided_sums(path, g, u, sigma_plus, sigma_minus);
  auto& d = r.diagnostics;
  d.s_plus = s.plus;
  d.s_minus = s.minus;
  for (long i = 1; i <= path.steps(); ++i)
    if (path.values[static_cast<std::size_t>(i - 1)] == 0.0) ++d.zero_count;
  if (!r.hit_zero) {
    detail::append_note(d, "path did not visit 0");
    return r;
  }
  const double denom = s.plus + s.minus;
  if (!(denom > 0.0)) {
    detail::append_note(d, "one-sided sums vanish");
    return r;
  }
  r.rho_hat = 2.0 / static_cast<double>(path.n) * static_cast<double>(d.zero_count) / denom;
  const double beta = (s.plus - s.minus) / denom;
  d.beta_raw = beta;
  r.beta_hat = std::clamp(beta, -1.0, 1.0);
  return r;
}

/// sigma_hat_{+/-} = sqrt(QV_{+/-} / occupation_{+/-}), each reported only when
/// the sampled path entered the corresponding half-line.
inline EstimateReport estimate_sigmas(const SamplePath& path) {
  EstimateReport r;
  detail::detect_events(path, r);
  auto& d = r.diagnostics;
  const QuadraticVariation qv = quadratic_variation_sums(path);
  d.qv_plus = qv.plus.terminal();
  d.qv_minus = qv.minus.terminal();
  d.occupation_plus = occupation_statistic(path, Interval::positive()).terminal();
  d.occupation_minus = occupation_statistic(path, Interval::negative()).terminal();
  if (r.hit_positive && d.occupation_plus > 0.0)
    r.sigma_plus_hat = std::sqrt(d.qv_plus / d.occupation_plus);
  else
    detail::append_note(d, "no positive occupation");
  if (r.hit_negative && d.occupation_minus > 0.0)
    r.sigma_minus_hat = std::sqrt(d.qv_minus / d.occupation_minus);
  else
    detail::append_note(d, "no negative occupation");
  return r;
}

/// Volatilities first, then (rho, beta) with the estimated volatilities in
/// place of the known ones.
inline EstimateReport estimate_full(const SamplePath& path, const TestFunction& g, const NormalizingSequence& u) {
  if (std::fabs(path.params.beta) >= 1.0 || path.reflected) throw ReflectionUnsupported("estimate_full");
  EstimateReport r = estimate_sigmas(path);
  if (!r.sigma_plus_hat || !r.sigma_minus_hat) {
    detail::append_note(r.diagnostics, "rho and beta need both volatilities");
    return r;
  }
  EstimateReport rb = estimate_rho_beta(path, g, u, *r.sigma_plus_hat, *r.sigma_minus_hat);
  r.rho_hat = rb.rho_hat;
  r.beta_hat = rb.beta_hat;
  auto& d = r.diagnostics;
  d.zero_count = rb.diagnostics.zero_count;
  d.s_plus = rb.diagnostics.s_plus;
  d.s_minus = rb.diagnostics.s_minus;
  d.beta_raw = rb.diagnostics.beta_raw;
  if (!rb.diagnostics.note.empty()) detail::append_note(d, rb.diagnostics.note);
  return r;
}

}  // namespace sosbm
