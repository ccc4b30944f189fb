#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace primscope {

/// Base class for all primscope errors. CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A verbose line that claims to be an exec/create event but cannot be parsed.
class MalformedRecordError : public Error {
public:
  MalformedRecordError(std::size_t line_no, const std::string& msg)
      : Error("line " + std::to_string(line_no) + ": " + msg), line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

private:
  std::size_t line_no_;
};

class GranularityMismatchError : public Error {
public:
  using Error::Error;
};

class UnsupportedDriverError : public Error {
public:
  using Error::Error;
};

class EmptySetError : public Error {
public:
  using Error::Error;
};

class DescriptorValidationError : public Error {
public:
  using Error::Error;
};

/// Malformed benchmark-results CSV; carries the offending line number.
class FormatError : public Error {
public:
  FormatError(std::size_t line_no, const std::string& msg)
      : Error("line " + std::to_string(line_no) + ": " + msg), line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

private:
  std::size_t line_no_;
};

class IncompleteDimsError : public Error {
public:
  using Error::Error;
};

class NoCoverageError : public Error {
public:
  using Error::Error;
};

class ShapeError : public Error {
public:
  using Error::Error;
};

class EmptyReductionError : public Error {
public:
  using Error::Error;
};

class BinaryTargetRequiredError : public Error {
public:
  using Error::Error;
};

class TargetRangeError : public Error {
public:
  using Error::Error;
};

class NoFeasiblePlanError : public Error {
public:
  using Error::Error;
};

class EmptyChartError : public Error {
public:
  using Error::Error;
};

class InvalidParameterError : public Error {
public:
  using Error::Error;
};

}  // namespace primscope
