#pragma once

// Experiment configuration and the batch commands behind the command-line
// tool: simulate, convergence, verify, estimate. Exit codes: 0 all checks
// pass, 1 a check failed, 2 configuration or I/O error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sosbm/audit.hpp"
#include "sosbm/estimators.hpp"
#include "sosbm/parallel.hpp"
#include "sosbm/path_io.hpp"
#include "sosbm/statistics.hpp"
#include "sosbm/transforms.hpp"

namespace sosbm {

enum ExitCode : int { kPass = 0, kFail = 1, kConfigError = 2 };

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field.empty() ? what : "config field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  SosBmParams params{1.0, 0.0, 1.0, 1.0};
  double x = 0.0;
  double t = 1.0;
  std::vector<long> n_ladder{1000, 10000, 100000};
  std::vector<NormalizingSequence> u{NormalizingSequence::sqrt()};
  std::string g = "hat";
  long paths = 200;
  std::uint64_t seed = 1;
  std::uint64_t stream_offset = 0;  // path i uses stream stream_offset + i
  std::string out = "out";
  unsigned jobs = 0;
  std::string reference = "auto";   // auto | local_time | ghat
  std::string estimation = "auto";  // auto | known | joint
  std::string scope = "all";        // verify: kernel | bounds | scaling | ghat_mass | reduction | all
  std::vector<double> scaling_c{0.25, 4.0};
  std::vector<double> g_hat_ladder{1e2, 1e4, 1e6};
  long reduction_paths = 100000;
  long reduction_n = 4;

  long finest() const { return n_ladder.back(); }

  void validate() const {
    try {
      params.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("rho/beta/sigma_minus/sigma_plus", e.what());
    }
    if (params.skew_sticky().reflected()) throw ConfigError("beta", "|beta| = 1 is not supported");
    if (!std::isfinite(x)) throw ConfigError("x", "must be finite");
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("t", "must be positive");
    if (n_ladder.empty()) throw ConfigError("n_ladder", "must not be empty");
    for (std::size_t i = 0; i < n_ladder.size(); ++i) {
      if (n_ladder[i] < 1) throw ConfigError("n_ladder", "entries must be >= 1");
      if (i > 0 && n_ladder[i] <= n_ladder[i - 1]) throw ConfigError("n_ladder", "must be strictly increasing");
      if (finest() % n_ladder[i] != 0)
        throw ConfigError("n_ladder", "every entry must divide the largest (coarse grids are subsampled)");
    }
    if (paths < 1) throw ConfigError("paths", "must be >= 1");
    if (u.empty()) throw ConfigError("u", "must name at least one sequence");
    try {
      test_functions::by_name(g);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("g", e.what());
    }
    if (reference != "auto" && reference != "local_time" && reference != "ghat")
      throw ConfigError("reference", "expected auto, local_time or ghat");
    if (estimation != "auto" && estimation != "known" && estimation != "joint")
      throw ConfigError("estimation", "expected auto, known or joint");
    static const char* scopes[] = {"kernel", "bounds", "scaling", "ghat_mass", "prop57", "reduction", "all"};
    if (std::find(std::begin(scopes), std::end(scopes), scope) == std::end(scopes))
      throw ConfigError("scope", "expected kernel, bounds, scaling, ghat_mass, reduction or all");
    for (double c : scaling_c)
      if (!(c > 0.0)) throw ConfigError("scaling_c", "entries must be positive");
    if (reduction_paths < 1) throw ConfigError("reduction_paths", "must be >= 1");
    if (reduction_n < 1) throw ConfigError("reduction_n", "must be >= 1");
  }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& field, const std::string& v) {
  double d;
  if (!parse_double(v, d)) throw ConfigError(field, "'" + v + "' is not a number");
  return d;
}

inline long to_long(const std::string& field, const std::string& v) {
  double d = to_double(field, v);  // accepts 1e5
  if (d != std::floor(d) || std::fabs(d) > 9e15) throw ConfigError(field, "'" + v + "' is not an integer");
  return static_cast<long>(d);
}

inline std::uint64_t to_u64(const std::string& field, const std::string& v) {
  std::uint64_t out = 0;
  const std::string t = trim(v);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(field, "'" + v + "' is not an unsigned 64-bit integer");
  return out;
}

inline NormalizingSequence to_sequence(const std::string& v) {
  if (v == "sqrt") return NormalizingSequence::sqrt();
  if (v == "log") return NormalizingSequence::log();
  if (v.rfind("power:", 0) == 0) {
    try {
      return NormalizingSequence::power(to_double("u", v.substr(6)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("u", e.what());
    }
  }
  throw ConfigError("u", "'" + v + "' is not one of sqrt, log, power:<alpha>");
}

inline std::string json_scalar(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_number_unsigned()) return std::to_string(j.get<std::uint64_t>());
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number()) return format_double(j.get<double>());
  throw ConfigError("", "unsupported JSON value " + j.dump());
}

}  // namespace detail

/// Builds a config from flat key/value pairs.
inline ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv) {
  ExperimentConfig c;
  double rho = c.params.rho;
  double beta = c.params.beta;
  double sm = c.params.sigma_minus;
  double sp = c.params.sigma_plus;
  for (const auto& [key, value] : kv) {
    using namespace detail;
    if (key == "rho") rho = to_double(key, value);
    else if (key == "beta") beta = to_double(key, value);
    else if (key == "sigma_minus") sm = to_double(key, value);
    else if (key == "sigma_plus") sp = to_double(key, value);
    else if (key == "x") c.x = to_double(key, value);
    else if (key == "t") c.t = to_double(key, value);
    else if (key == "n") c.n_ladder = {to_long(key, value)};
    else if (key == "n_ladder") {
      c.n_ladder.clear();
      for (const auto& s : split_list(value)) c.n_ladder.push_back(to_long(key, s));
    } else if (key == "u") {
      c.u.clear();
      for (const auto& s : split_list(value)) c.u.push_back(to_sequence(s));
    } else if (key == "g") c.g = trim(value);
    else if (key == "paths") c.paths = to_long(key, value);
    else if (key == "seed") c.seed = to_u64(key, value);
    else if (key == "stream_offset") c.stream_offset = to_u64(key, value);
    else if (key == "out") c.out = trim(value);
    else if (key == "jobs") c.jobs = static_cast<unsigned>(to_long(key, value));
    else if (key == "reference") c.reference = trim(value);
    else if (key == "estimation") c.estimation = trim(value);
    else if (key == "scope") c.scope = trim(value);
    else if (key == "scaling_c") {
      c.scaling_c.clear();
      for (const auto& s : split_list(value)) c.scaling_c.push_back(to_double(key, s));
    } else if (key == "g_hat_ladder" || key == "prop57_ladder") {
      c.g_hat_ladder.clear();
      for (const auto& s : split_list(value)) c.g_hat_ladder.push_back(to_double(key, s));
    } else if (key == "reduction_paths") c.reduction_paths = to_long(key, value);
    else if (key == "reduction_n") c.reduction_n = to_long(key, value);
    else throw ConfigError(key, "unknown key");
  }
  try {
    c.params = SosBmParams{rho, beta, sm, sp};
  } catch (const std::invalid_argument& e) {
    throw ConfigError("rho/beta/sigma_minus/sigma_plus", e.what());
  }
  c.validate();
  return c;
}

/// Parses "key = value" lines ('#' starts a comment) or a JSON object with
/// the same keys (lists as arrays).
inline ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  const std::string body = detail::trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("", "JSON config must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_array()) {
        std::string joined;
        for (const auto& e : it.value()) joined += (joined.empty() ? "" : ",") + detail::json_scalar(e);
        kv[it.key()] = joined;
      } else {
        kv[it.key()] = detail::json_scalar(it.value());
      }
    }
    return config_from_map(kv);
  }
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    if (kv.count(key)) throw ConfigError(key, "given twice");
    kv[key] = detail::trim(line.substr(eq + 1));
  }
  return config_from_map(kv);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

struct RunOptions {
  bool timestamp = true;
  std::ostream* log = &std::cout;
};

namespace detail {

inline std::filesystem::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("out", "cannot create directory " + dir + ": " + ec.message());
  return std::filesystem::path(dir);
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw ConfigError("out", "cannot write " + p.string());
  return os;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_manifest_head(std::ostream& os, const std::string& command, const ExperimentConfig& c,
                                const RunOptions& opt) {
  if (opt.timestamp) os << "# generated=" << utc_timestamp() << '\n';
  os << "# command=" << command << '\n'
     << "# rho=" << format_double(c.params.rho) << '\n'
     << "# beta=" << format_double(c.params.beta) << '\n'
     << "# sigma_minus=" << format_double(c.params.sigma_minus) << '\n'
     << "# sigma_plus=" << format_double(c.params.sigma_plus) << '\n'
     << "# x=" << format_double(c.x) << '\n'
     << "# t=" << format_double(c.t) << '\n'
     << "# seed=" << c.seed << '\n'
     << "# paths=" << c.paths << '\n'
     << "# stream_rule=path i uses stream " << c.stream_offset << " + i\n";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// simulate

/// One CSV per path at the finest grid of the ladder, plus manifest.csv.
inline int run_simulate(const ExperimentConfig& c, const RunOptions& opt = {}) {
  const auto dir = detail::ensure_dir(c.out);
  std::vector<std::string> files(static_cast<std::size_t>(c.paths));
  std::vector<std::string> errors(static_cast<std::size_t>(c.paths));
  parallel_for(files.size(), c.jobs, [&](std::size_t i) {
    RngStream rng(c.seed, c.stream_offset + i);
    const SamplePath path = simulate_path(c.params, c.x, c.finest(), c.t, rng);
    char name[32];
    std::snprintf(name, sizeof name, "path_%05zu.csv", i);
    files[i] = name;
    std::ofstream os(dir / name);
    if (!os) {
      errors[i] = "cannot write " + (dir / name).string();
      return;
    }
    write_path_csv(os, path);
  });
  for (const auto& e : errors)
    if (!e.empty()) throw ConfigError("out", e);
  auto manifest = detail::open_out(dir / "manifest.csv");
  detail::write_manifest_head(manifest, "simulate", c, opt);
  manifest << "# n=" << c.finest() << '\n' << "path_id,seed,stream,file\n";
  for (std::size_t i = 0; i < files.size(); ++i)
    manifest << i << ',' << c.seed << ',' << c.stream_offset + i << ',' << files[i] << '\n';
  *opt.log << "wrote " << files.size() << " paths to " << dir.string() << '\n';
  return kPass;
}

// ---------------------------------------------------------------------------
// convergence

struct ConvergenceRow {
  std::string u_name;
  long n = 0;
  double u_n = 0.0;
  double mc_mean = 0.0;
  double mc_se = 0.0;
  double limit_value = 0.0;  // m_0(g) times the mean reference local time
  double limit_se = 0.0;
  double z_score = 0.0;      // (mc_mean - limit_value) / combined SE
  double discrepancy = 0.0;  // mc_mean - limit_value
};

struct EstimatorRow {
  long n = 0;
  std::string name;
  double truth = 0.0;
  double median = NAN;
  double iqr = NAN;
  double median_se = NAN;
  long reported = 0;
  double error() const { return std::fabs(median - truth); }
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  std::vector<EstimatorRow> estimators;
  long paths_hitting_zero = 0;
  bool negative_control = false;
  std::string reference;
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

namespace detail {

inline double median_se(const std::vector<double>& v) {
  if (v.size() < 2) return NAN;
  const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
  return 1.2533141373155 * (iqr / 1.3489795003921634) / std::sqrt(static_cast<double>(v.size()));
}

inline bool within_relative(double value, double truth, double rel) {
  if (truth == 0.0) return std::fabs(value) <= rel;
  return std::fabs(value - truth) <= rel * std::fabs(truth);
}

}  // namespace detail

/// Runs the ladder on nested paths: each path is simulated once on the finest
/// grid and subsampled for the coarser ones, so ladder levels share the same
/// realizations and the same reference local time (taken on the finest grid).
inline ConvergenceResult compute_convergence(const ExperimentConfig& c) {
  c.validate();
  const TestFunction g = test_functions::by_name(c.g);
  const SosBmParams& p = c.params;
  ConvergenceResult result;
  result.negative_control = !g.vanishes_at_zero;
  std::string reference = c.reference;
  if (reference == "auto") reference = p.rho > 0.0 ? "local_time" : "ghat";
  if (reference == "local_time" && !(p.rho > 0.0))
    throw ConfigError("reference", "the occupation-based local time needs rho > 0; use reference = ghat");
  result.reference = reference;
  const bool joint = c.estimation == "joint" || (c.estimation == "auto" && !p.is_skew_sticky());
  const ParamMap map = map_params(p);
  std::optional<GHatTable> ghat;
  if (reference == "ghat") ghat.emplace(map.target, static_cast<double>(c.finest()));

  const std::size_t N = static_cast<std::size_t>(c.paths);
  const std::size_t L = c.n_ladder.size();
  const std::size_t U = c.u.size();
  std::vector<double> ref(N);
  std::vector<char> hit(N);
  // stat[(k * U + j) * N + i]: level k, sequence j, path i
  std::vector<double> stat(L * U * N);
  std::vector<EstimateReport> est(L * N);
  const double m0 = m0_integral(p, g);

  parallel_for(N, c.jobs, [&](std::size_t i) {
    RngStream rng(c.seed, c.stream_offset + i);
    const SamplePath fine = simulate_path(p, c.x, c.finest(), c.t, rng);
    if (reference == "local_time") {
      ref[i] = reference_local_time(fine).back();
    } else {
      SamplePath y = fine;
      for (double& v : y.values) v = t1(p, v);
      ref[i] = g_hat_local_time(y, *ghat).terminal() / map.local_time_factor;
    }
    hit[i] = std::find(fine.values.begin(), fine.values.end(), 0.0) != fine.values.end();
    for (std::size_t k = 0; k < L; ++k) {
      const SamplePath path = subsample(fine, c.finest() / c.n_ladder[k]);
      for (std::size_t j = 0; j < U; ++j) stat[(k * U + j) * N + i] = local_time_statistic(path, g, c.u[j]).terminal();
      if (g.vanishes_at_zero && g.integral_pos != 0.0 && g.integral_neg != 0.0) {
        est[k * N + i] = joint ? estimate_full(path, g, c.u.front())
                               : estimate_rho_beta(path, g, c.u.front(), p.sigma_plus, p.sigma_minus);
        if (!joint) {
          const EstimateReport s = estimate_sigmas(path);
          est[k * N + i].sigma_plus_hat = s.sigma_plus_hat;
          est[k * N + i].sigma_minus_hat = s.sigma_minus_hat;
        }
      }
    }
  });
  for (char h : hit) result.paths_hitting_zero += h;

  std::vector<double> limit(N);
  for (std::size_t i = 0; i < N; ++i) limit[i] = m0 * ref[i];
  const Moments ml = pairwise_moments(limit);
  for (std::size_t j = 0; j < U; ++j) {
    for (std::size_t k = 0; k < L; ++k) {
      const Moments ms = pairwise_moments(std::span<const double>(stat).subspan((k * U + j) * N, N));
      ConvergenceRow row;
      row.u_name = c.u[j].name();
      row.n = c.n_ladder[k];
      row.u_n = c.u[j](row.n);
      row.mc_mean = ms.mean;
      row.mc_se = ms.standard_error();
      row.limit_value = ml.mean;
      row.limit_se = ml.standard_error();
      row.discrepancy = ms.mean - ml.mean;
      const double se = std::hypot(row.mc_se, row.limit_se);
      row.z_score = se > 0.0 ? row.discrepancy / se : (row.discrepancy == 0.0 ? 0.0 : INFINITY);
      result.rows.push_back(row);
    }
  }

  if (g.vanishes_at_zero && g.integral_pos != 0.0 && g.integral_neg != 0.0) {
    struct Field {
      const char* name;
      double truth;
      std::optional<double> EstimateReport::*member;
    };
    const Field fields[] = {{"rho", p.rho, &EstimateReport::rho_hat},
                            {"beta", p.beta, &EstimateReport::beta_hat},
                            {"sigma_minus", p.sigma_minus, &EstimateReport::sigma_minus_hat},
                            {"sigma_plus", p.sigma_plus, &EstimateReport::sigma_plus_hat}};
    for (std::size_t k = 0; k < L; ++k) {
      for (const auto& f : fields) {
        std::vector<double> v;
        for (std::size_t i = 0; i < N; ++i)
          if (const auto& e = est[k * N + i].*(f.member)) v.push_back(*e);
        EstimatorRow row;
        row.n = c.n_ladder[k];
        row.name = f.name;
        row.truth = f.truth;
        row.reported = static_cast<long>(v.size());
        if (!v.empty()) {
          row.median = median(v);
          row.iqr = quantile(v, 0.75) - quantile(v, 0.25);
          row.median_se = detail::median_se(v);
        }
        result.estimators.push_back(row);
      }
    }
  }

  // Pass conditions.
  if (reference == "local_time" && result.paths_hitting_zero < std::max<long>(10, c.paths / 10)) {
    result.failures.push_back("conditioning-starved: only " + std::to_string(result.paths_hitting_zero) +
                              " of " + std::to_string(c.paths) + " paths visited 0");
    return result;
  }
  if (!result.negative_control) {
    for (std::size_t j = 0; j < U; ++j) {
      const ConvergenceRow& first = result.rows[j * L];
      const ConvergenceRow& last = result.rows[j * L + L - 1];
      if (!(std::fabs(last.z_score) <= 2.0))
        result.failures.push_back(last.u_name + ": |z| = " + format_double(std::fabs(last.z_score)) +
                                  " > 2 at n = " + std::to_string(last.n));
      if (L > 1 && !(std::fabs(last.discrepancy) < std::fabs(first.discrepancy)))
        result.failures.push_back(last.u_name + ": discrepancy did not shrink along the ladder");
    }
  }
  for (const auto& row : result.estimators) {
    if (row.n != c.finest()) continue;
    if (row.name == std::string("rho") && p.rho == 0.0) continue;  // nothing to be relative to
    if (row.name == std::string("beta") && p.beta == 0.0) continue;
    if (row.reported == 0 || !detail::within_relative(row.median, row.truth, 0.10))
      result.failures.push_back(row.name + ": median " + format_double(row.median) + " not within 10% of " +
                                format_double(row.truth));
  }
  return result;
}

inline void write_convergence(const ConvergenceResult& r, const std::filesystem::path& dir, const ExperimentConfig& c,
                              const RunOptions& opt) {
  std::map<std::string, std::ofstream> summaries;
  for (const auto& row : r.rows) {
    auto it = summaries.find(row.u_name);
    if (it == summaries.end()) {
      std::string name = row.u_name;
      std::replace(name.begin(), name.end(), ':', '_');
      it = summaries.emplace(row.u_name, detail::open_out(dir / ("summary_" + name + ".csv"))).first;
      it->second << "n,u_n,mc_mean,mc_se,limit_value,z_score\n";
    }
    it->second << row.n << ',' << format_double(row.u_n) << ',' << format_double(row.mc_mean) << ','
               << format_double(row.mc_se) << ',' << format_double(row.limit_value) << ','
               << format_double(row.z_score) << '\n';
  }
  auto est = detail::open_out(dir / "estimators.csv");
  est << "n,parameter,truth,median,iqr,median_se,reported\n";
  for (const auto& e : r.estimators)
    est << e.n << ',' << e.name << ',' << format_double(e.truth) << ',' << format_double(e.median) << ','
        << format_double(e.iqr) << ',' << format_double(e.median_se) << ',' << e.reported << '\n';
  auto manifest = detail::open_out(dir / "manifest.csv");
  detail::write_manifest_head(manifest, "convergence", c, opt);
  manifest << "# g=" << c.g << (r.negative_control ? " (negative control: g(0) != 0, limit does not apply)" : "")
           << '\n'
           << "# reference=" << r.reference << '\n'
           << "# paths_hitting_zero=" << r.paths_hitting_zero << '\n'
           << "# pass=" << (r.passed() ? "true" : "false") << '\n';
  for (const auto& f : r.failures) manifest << "# failure=" << f << '\n';
}

inline void print_convergence(const ConvergenceResult& r, std::ostream& os) {
  os << std::left << std::setw(12) << "u" << std::right << std::setw(9) << "n" << std::setw(10) << "u_n"
     << std::setw(12) << "mc_mean" << std::setw(10) << "mc_se" << std::setw(12) << "limit" << std::setw(9) << "z"
     << (r.negative_control ? "   (negative control, expected to fail)" : "") << '\n';
  for (const auto& row : r.rows) {
    os << std::left << std::setw(12) << row.u_name << std::right << std::setw(9) << row.n << std::fixed
       << std::setprecision(3) << std::setw(10) << row.u_n << std::setprecision(5) << std::setw(12) << row.mc_mean
       << std::setw(10) << row.mc_se << std::setw(12) << row.limit_value << std::setprecision(2) << std::setw(9)
       << row.z_score << '\n';
  }
  if (!r.estimators.empty()) {
    os << '\n' << std::setw(9) << "n" << std::setw(14) << "parameter" << std::setw(10) << "truth" << std::setw(11)
       << "median" << std::setw(10) << "iqr" << std::setw(10) << "reported" << '\n';
    for (const auto& e : r.estimators)
      os << std::setw(9) << e.n << std::setw(14) << e.name << std::setprecision(4) << std::setw(10) << e.truth
         << std::setw(11) << e.median << std::setw(10) << e.iqr << std::setw(10) << e.reported << '\n';
  }
  os << std::defaultfloat << "paths visiting 0: " << r.paths_hitting_zero << '\n';
  for (const auto& f : r.failures) os << "FAIL " << f << '\n';
  os << (r.passed() ? "PASS" : "FAIL") << '\n';
}

inline int run_convergence(const ExperimentConfig& c, const RunOptions& opt = {}) {
  const auto dir = detail::ensure_dir(c.out);
  const ConvergenceResult r = compute_convergence(c);
  write_convergence(r, dir, c, opt);
  print_convergence(r, *opt.log);
  return r.passed() ? kPass : kFail;
}

// ---------------------------------------------------------------------------
// verify

inline std::vector<SkewStickyParams> audit_cells() {
  std::vector<SkewStickyParams> cells;
  for (double rho : {0.0, 0.1, 1.0, 10.0})
    for (double beta : {-0.9, -0.5, 0.0, 0.5, 0.9}) cells.push_back({rho, beta});
  return cells;
}

/// Runs the audits for one scope and returns the combined report.
inline VerificationReport compute_verify(const ExperimentConfig& c, const std::string& scope) {
  VerificationReport all;
  all.name = scope;
  const auto want = [&](const char* s) { return scope == "all" || scope == s; };
  if (want("kernel")) {
    all.append(verify_normalization(audit_cells(), {0.01, 0.1, 1.0, 10.0}, {-3.0, -1.0, 0.0, 1.0, 3.0}));
    std::uint64_t stream = 0;
    for (const auto& p : audit_cells()) all.append(verify_chapman_kolmogorov(p, 50, c.seed, stream++));
    for (double rho : {0.0, 1.0, 10.0})
      for (double beta : {-0.9, -0.5, 0.0, 0.5, 0.9}) all.append(verify_kernel_bound({rho, beta}));
  }
  if (want("bounds")) {
    for (double rho : {0.0, 1.0, 10.0})
      for (double beta : {-0.5, 0.0, 0.5}) {
        all.append(verify_semigroup_bounds({rho, beta}));
        all.append(verify_gamma_bounds({rho, beta}, {4, 16, 64, 256}));
      }
  }
  if (want("scaling")) {
    for (double cc : c.scaling_c)
      for (const auto& p : {SkewStickyParams{1.0, 0.3}, SkewStickyParams{0.0, 0.0}, SkewStickyParams{10.0, -0.5},
                            c.params.skew_sticky()})
        all.append(verify_scaling(p, cc));
  }
  if (want("ghat_mass") || scope == "prop57") {
    all.append(verify_g_hat_mass(c.params.skew_sticky(), c.g_hat_ladder));
    all.append(verify_g_hat_mass({0.0, c.params.beta}, c.g_hat_ladder));
  }
  if (want("reduction")) {
    const SosBmParams cells[] = {{1.0, 0.0, 2.0, 1.0}, {0.5, 0.3, 1.0, 2.0}, {2.0, -0.4, 0.5, 1.5}, c.params};
    std::uint64_t k = 0;
    for (const auto& p : cells) {
      const ReductionReport r = verify_reduction(p, c.reduction_n, 1.0, static_cast<std::size_t>(c.reduction_paths),
                                                 c.seed + 7919 * ++k, c.jobs);
      all.add({"reduction ks rho=" + format_double(p.rho) + " beta=" + format_double(p.beta) +
                   " sm=" + format_double(p.sigma_minus) + " sp=" + format_double(p.sigma_plus),
               1.0, NAN, NAN, r.ks.statistic, r.ks.threshold, r.ks.statistic / r.ks.threshold, r.ks.pass()});
      all.add({"reduction zero set", 1.0, NAN, NAN, static_cast<double>(r.zero_count), NAN, NAN,
               r.zero_set_preserved});
    }
  }
  return all;
}

inline int run_verify(const ExperimentConfig& c, const std::string& scope, const RunOptions& opt = {}) {
  const auto dir = detail::ensure_dir(c.out);
  const VerificationReport r = compute_verify(c, scope);
  auto os = detail::open_out(dir / ("verify_" + scope + ".csv"));
  r.write_csv(os);
  auto fitted = detail::open_out(dir / ("verify_" + scope + "_fitted.csv"));
  fitted << "name,value\n";
  for (const auto& [k, v] : r.fitted) fitted << '"' << k << "\"," << format_double(v) << '\n';
  long failed = 0;
  for (const auto& row : r.rows)
    if (!row.pass) {
      ++failed;
      *opt.log << "FAIL " << row.quantity << " t=" << format_double(row.t) << " x=" << format_double(row.x)
               << " lhs=" << format_double(row.lhs) << " rhs=" << format_double(row.rhs) << '\n';
    }
  *opt.log << "verify " << scope << ": " << r.rows.size() - failed << "/" << r.rows.size() << " checks pass\n";
  return failed == 0 ? kPass : kFail;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOptions {
  std::optional<double> sigma_minus;
  std::optional<double> sigma_plus;
  bool joint = false;
  std::string g = "hat";
  NormalizingSequence u = NormalizingSequence::sqrt();
};

inline EstimateReport estimate_path(const SamplePath& path, const EstimateOptions& o) {
  const TestFunction g = test_functions::by_name(o.g);
  if (o.joint) return estimate_full(path, g, o.u);
  if (!o.sigma_minus || !o.sigma_plus)
    throw ConfigError("sigma", "give both --sigma-minus and --sigma-plus, or --joint");
  EstimateReport r = estimate_rho_beta(path, g, o.u, *o.sigma_plus, *o.sigma_minus);
  const EstimateReport s = estimate_sigmas(path);
  r.sigma_plus_hat = s.sigma_plus_hat;
  r.sigma_minus_hat = s.sigma_minus_hat;
  r.diagnostics.qv_plus = s.diagnostics.qv_plus;
  r.diagnostics.qv_minus = s.diagnostics.qv_minus;
  r.diagnostics.occupation_plus = s.diagnostics.occupation_plus;
  r.diagnostics.occupation_minus = s.diagnostics.occupation_minus;
  return r;
}

/// Reads one path CSV and writes a single-row report to `os`.
inline int run_estimate(const std::string& input, const EstimateOptions& o, std::ostream& os) {
  std::ifstream in(input);
  if (!in) throw ConfigError("input", "cannot read " + input);
  const SamplePath path = read_path_csv(in, input);
  const EstimateReport r = estimate_path(path, o);
  EstimateReport::write_csv_header(os);
  r.write_csv_row(os);
  return kPass;
}

}  // namespace sosbm
