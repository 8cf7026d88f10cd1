#pragma once

#include <stdexcept>
#include <string>

namespace linesfm {

class LineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The line passes (numerically) through the optical center.
class DegenerateLine : public LineError {
 public:
  explicit DegenerateLine(const std::string& what) : LineError("degenerate line: " + what) {}
};

/// Zero inverse depth; the line cannot be mapped back to a finite depth.
class LineAtInfinity : public LineError {
 public:
  explicit LineAtInfinity(const std::string& what) : LineError("line at infinity: " + what) {}
};

/// The moment vector sits on a pole of the spherical parameterization.
class SphericalSingularity : public LineError {
 public:
  explicit SphericalSingularity(const std::string& what)
      : LineError("spherical singularity: " + what) {}
};

class NonFiniteObjective : public std::runtime_error {
 public:
  explicit NonFiniteObjective(const std::string& what)
      : std::runtime_error("non-finite objective: " + what) {}
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace linesfm
