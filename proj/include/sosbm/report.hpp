#pragma once

// Verification reports: one row per checked quantity, serialized as CSV with
// columns quantity,t,x,y,lhs,rhs,ratio,pass.

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace sosbm {

/// Shortest decimal representation that round-trips a double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

struct CheckRow {
  std::string quantity;
  double t = NAN;
  double x = NAN;
  double y = NAN;
  double lhs = NAN;
  double rhs = NAN;
  double ratio = NAN;
  bool pass = true;
};

struct VerificationReport {
  std::string name;
  std::vector<CheckRow> rows;
  std::map<std::string, double> fitted;  // fitted constants and slopes

  bool passed() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }

  void add(CheckRow row) { rows.push_back(std::move(row)); }

  void append(const VerificationReport& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    for (const auto& [k, v] : other.fitted) fitted[other.name.empty() ? k : other.name + "." + k] = v;
  }

  void write_csv(std::ostream& os) const {
    os << "quantity,t,x,y,lhs,rhs,ratio,pass\n";
    for (const auto& r : rows) {
      os << r.quantity << ',' << format_double(r.t) << ',' << format_double(r.x) << ','
         << format_double(r.y) << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
         << format_double(r.ratio) << ',' << (r.pass ? "true" : "false") << '\n';
    }
  }
};

}  // namespace sosbm
