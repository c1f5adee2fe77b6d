#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pilotwave {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ZeroNorm : public Error {
 public:
  ZeroNorm() : Error("wavefunction has zero norm") {}
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class TimeMismatch : public Error {
 public:
  TimeMismatch(double expected, double actual);
  double expected() const { return expected_; }
  double actual() const { return actual_; }

 private:
  double expected_;
  double actual_;
};

class VanishingOverlap : public Error {
 public:
  explicit VanishingOverlap(double overlap);
  double overlap() const { return overlap_; }

 private:
  double overlap_;
};

class PreconditionViolated : public Error {
 public:
  PreconditionViolated(const std::string& what, double residual);
  double residual() const { return residual_; }

 private:
  double residual_;
};

class UnsupportedOperator : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class IOFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace pilotwave
