#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nhpd {

/// Error classes; the numeric value doubles as the CLI exit code.
enum class ErrorCategory : int {
  Config = 2,
  Parse = 3,
  MeshIntegrity = 4,
  Model = 5,
  Correction = 6,
  Solver = 7,
  Io = 8,
};

const char* category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(ErrorCategory::Config, field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCategory::Parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MeshIntegrityError : public Error {
 public:
  explicit MeshIntegrityError(const std::string& what) : Error(ErrorCategory::MeshIntegrity, what) {}
};

class DegenerateElementError : public MeshIntegrityError {
 public:
  explicit DegenerateElementError(std::int64_t element_id)
      : MeshIntegrityError("degenerate (zero-area) triangle, element id " + std::to_string(element_id)),
        element_id_(element_id) {}
  std::int64_t element_id() const noexcept { return element_id_; }

 private:
  std::int64_t element_id_;
};

class IsolatedNodeError : public MeshIntegrityError {
 public:
  explicit IsolatedNodeError(std::int64_t node_id)
      : MeshIntegrityError("node " + std::to_string(node_id) + " belongs to no element and carries no volume"),
        node_id_(node_id) {}
  std::int64_t node_id() const noexcept { return node_id_; }

 private:
  std::int64_t node_id_;
};

class ModelError : public Error {
 public:
  explicit ModelError(const std::string& what) : Error(ErrorCategory::Model, what) {}
};

class DuplicatePointError : public ModelError {
 public:
  DuplicatePointError(std::size_t first, std::size_t second)
      : ModelError("coincident material points " + std::to_string(first) + " and " + std::to_string(second)),
        first_(first), second_(second) {}
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_, second_;
};

class CorrectionError : public Error {
 public:
  CorrectionError(const std::string& what, std::vector<double> residuals = {})
      : Error(ErrorCategory::Correction, what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(ErrorCategory::Solver, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

}  // namespace nhpd
