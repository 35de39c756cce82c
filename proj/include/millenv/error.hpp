#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace millenv {

enum class ErrorKind {
  range,
  size,
  detection,
  quality,
  coverage,
  input,
  parse,
  config,
};

const char* to_string(ErrorKind kind) noexcept;

// Base of every error the library throws. The kind lets the CLI map failures
// onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(ErrorKind::range, what) {}
};

class SizeError : public Error {
 public:
  explicit SizeError(const std::string& what) : Error(ErrorKind::size, what) {}
};

class DetectionError : public Error {
 public:
  explicit DetectionError(const std::string& what) : Error(ErrorKind::detection, what) {}
};

class CoverageError : public Error {
 public:
  explicit CoverageError(const std::string& what) : Error(ErrorKind::coverage, what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// One inter-pulse gap that falls outside the allowed band around the median.
struct GapViolation {
  std::size_t index;  // gap between pulse `index` and `index + 1`
  double gap_s;
  double median_gap_s;
};

class QualityError : public Error {
 public:
  explicit QualityError(std::vector<GapViolation> gaps);
  const std::vector<GapViolation>& gaps() const noexcept { return gaps_; }

 private:
  std::vector<GapViolation> gaps_;
};

}  // namespace millenv
