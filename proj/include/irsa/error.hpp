#pragma once

#include <stdexcept>
#include <string>

namespace irsa {

// Exit-code classes used by the command-line front end.
enum class ErrorKind { InvalidParameter, Infeasible, DimensionMismatch, ComplexityCap, MissingArtifact, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidParameter : Error {
  // `field` names the offending configuration entry.
  InvalidParameter(std::string field, const std::string& what)
      : Error(ErrorKind::InvalidParameter, field + ": " + what), field(std::move(field)) {}
  std::string field;
};

struct InfeasibleQuota : Error {
  explicit InfeasibleQuota(const std::string& what) : Error(ErrorKind::Infeasible, what) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what) : Error(ErrorKind::DimensionMismatch, what) {}
};

struct ComplexityCap : Error {
  explicit ComplexityCap(const std::string& what) : Error(ErrorKind::ComplexityCap, what) {}
};

struct MissingArtifact : Error {
  explicit MissingArtifact(const std::string& path)
      : Error(ErrorKind::MissingArtifact, "missing prerequisite artifact: " + path), path(path) {}
  std::string path;
};

struct NumericalFailure : Error {
  explicit NumericalFailure(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

}  // namespace irsa
