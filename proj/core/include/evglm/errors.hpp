#pragma once

#include <stdexcept>
#include <string>

namespace evglm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or matrix sizes that do not fit the partition / family.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A parameter or observation outside the admissible domain. When the
// violation is a parameter, distance_to_boundary() carries how far outside
// (negative) or how close to the edge the value was.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, double distance_to_boundary = 0.0)
      : Error(what), distance_(distance_to_boundary) {}
  double distance_to_boundary() const noexcept { return distance_; }

 private:
  double distance_;
};

// Fisher information requested inside the guard band around a pole.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double pole) : Error(what), pole_(pole) {}
  double pole() const noexcept { return pole_; }

 private:
  double pole_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace evglm
