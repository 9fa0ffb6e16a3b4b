#pragma once

// Path CSV: '#' comment lines carrying key=value metadata, a header "i,t,x",
// then one row per grid point with round-trip precision.

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sosbm/report.hpp"
#include "sosbm/sampler.hpp"

namespace sosbm {

class PathSchemaError : public std::runtime_error {
 public:
  PathSchemaError(const std::string& source, long line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

inline void write_path_csv(std::ostream& os, const SamplePath& path) {
  const auto& p = path.params;
  os << "# rho=" << format_double(p.rho) << '\n'
     << "# beta=" << format_double(p.beta) << '\n'
     << "# sigma_minus=" << format_double(p.sigma_minus) << '\n'
     << "# sigma_plus=" << format_double(p.sigma_plus) << '\n'
     << "# reflected=" << (path.reflected ? "true" : "false") << '\n'
     << "# n=" << path.n << '\n'
     << "# horizon=" << format_double(path.horizon) << '\n'
     << "# start=" << format_double(path.start) << '\n'
     << "# seed=" << path.seed << '\n'
     << "# stream=" << path.stream << '\n'
     << "i,t,x\n";
  for (long i = 0; i <= path.steps(); ++i)
    os << i << ',' << format_double(path.time(i)) << ',' << format_double(path.values[static_cast<std::size_t>(i)])
       << '\n';
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline bool parse_long(const std::string& s, long& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

}  // namespace detail

/// Reads a path CSV. Metadata is optional; without "n" the grid step is read
/// from the t column. Unknown metadata keys are ignored.
inline SamplePath read_path_csv(std::istream& is, const std::string& source = "<path>") {
  std::map<std::string, std::string> meta;
  std::map<std::string, long> meta_line;
  std::string line;
  long lineno = 0;
  bool header = false;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<long> row_lines;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      if (header) throw PathSchemaError(source, lineno, "comment after header");
      const std::string body = detail::trim(t.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;  // free-form comment
      meta[detail::trim(body.substr(0, eq))] = detail::trim(body.substr(eq + 1));
      meta_line[detail::trim(body.substr(0, eq))] = lineno;
      continue;
    }
    if (!header) {
      std::string compact;
      for (char c : t)
        if (c != ' ' && c != '\t') compact += c;
      if (compact != "i,t,x") throw PathSchemaError(source, lineno, "expected header 'i,t,x'");
      header = true;
      continue;
    }
    std::stringstream ss(t);
    std::string a;
    std::string b;
    std::string c;
    std::string extra;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',') ||
        std::getline(ss, extra, ','))
      throw PathSchemaError(source, lineno, "expected 3 columns");
    long i;
    double ti;
    double xi;
    if (!detail::parse_long(a, i)) throw PathSchemaError(source, lineno, "column i is not an integer");
    if (!detail::parse_double(b, ti) || !std::isfinite(ti))
      throw PathSchemaError(source, lineno, "column t is not a finite number");
    if (!detail::parse_double(c, xi) || !std::isfinite(xi))
      throw PathSchemaError(source, lineno, "column x is not a finite number");
    if (i != static_cast<long>(values.size()))
      throw PathSchemaError(source, lineno, "row index " + std::to_string(i) + " out of sequence");
    row_lines.push_back(lineno);
    times.push_back(ti);
    values.push_back(xi);
  }
  if (!header) throw PathSchemaError(source, lineno, "missing header 'i,t,x'");
  if (values.empty()) throw PathSchemaError(source, lineno, "no data rows");

  SamplePath path;
  auto num = [&](const std::string& key, double fallback) {
    const auto it = meta.find(key);
    if (it == meta.end()) return fallback;
    double v;
    if (!detail::parse_double(it->second, v))
      throw PathSchemaError(source, meta_line[key], "metadata '" + key + "' is not a number");
    return v;
  };
  if (meta.count("n")) {
    long n;
    if (!detail::parse_long(meta["n"], n) || n < 1)
      throw PathSchemaError(source, meta_line["n"], "metadata 'n' must be a positive integer");
    path.n = n;
  } else {
    if (values.size() < 2) throw PathSchemaError(source, lineno, "cannot infer n from a single row");
    const double step = times[1] - times[0];
    if (!(step > 0.0)) throw PathSchemaError(source, row_lines[1], "t column is not increasing");
    path.n = std::lround(1.0 / step);
  }
  try {
    path.params = SosBmParams{num("rho", 0.0), num("beta", 0.0), num("sigma_minus", 1.0), num("sigma_plus", 1.0)};
  } catch (const std::invalid_argument& e) {
    throw PathSchemaError(source, 1, e.what());
  }
  path.reflected = meta.count("reflected") && meta["reflected"] == "true";
  path.horizon = num("horizon", static_cast<double>(values.size() - 1) / static_cast<double>(path.n));
  path.start = values.front();
  auto u64 = [&](const std::string& key) -> std::uint64_t {
    const auto it = meta.find(key);
    if (it == meta.end()) return 0;
    std::uint64_t v = 0;
    const std::string& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw PathSchemaError(source, meta_line[key], "metadata '" + key + "' is not an unsigned integer");
    return v;
  };
  path.seed = u64("seed");
  path.stream = u64("stream");
  path.values = std::move(values);
  return path;
}

}  // namespace sosbm
