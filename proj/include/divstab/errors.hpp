#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>

namespace divstab {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Expression text rejected by the parser. offset() is a byte position into
/// the original input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation hit an undefined value: division by zero, ln/sqrt of an invalid
/// argument, or a non-finite intermediate. Carries the offending point.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, Eigen::VectorXd point)
      : Error(what), point_(std::move(point)) {}
  const Eigen::VectorXd& point() const { return point_; }

 private:
  Eigen::VectorXd point_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

/// Invalid or missing configuration. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace divstab
