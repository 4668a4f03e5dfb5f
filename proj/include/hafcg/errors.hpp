#pragma once

#include <stdexcept>
#include <string>

namespace hafcg {

/// Invalid or physically inconsistent configuration input.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Element-level failure during operator assembly (e.g. singular Jacobian).
class AssemblyError : public std::runtime_error {
 public:
  explicit AssemblyError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Linear solver breakdown; carries the field it happened on.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& field, const std::string& msg)
      : std::runtime_error("solver failure on field '" + field + "': " + msg),
        field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

} // namespace hafcg
