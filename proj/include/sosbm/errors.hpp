#pragma once

#include <stdexcept>
#include <string>

namespace sosbm {

/// Thrown for t <= 0 where a positive horizon is required.
class NonPositiveTime : public std::domain_error {
 public:
  explicit NonPositiveTime(const std::string& where)
      : std::domain_error(where + ": time must be positive") {}
};

/// Thrown when an operation defined only for |beta| < 1 receives |beta| = 1.
class ReflectionUnsupported : public std::domain_error {
 public:
  explicit ReflectionUnsupported(const std::string& where)
      : std::domain_error(where + ": |beta| = 1 (reflection) is not supported here") {}
};

inline void require_positive_time(double t, const char* where) {
  if (!(t > 0.0)) throw NonPositiveTime(where);
}

}  // namespace sosbm
