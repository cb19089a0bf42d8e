#pragma once

#include <stdexcept>
#include <string>

namespace crackdual {

enum class ErrorKind {
  domain_violation,
  resolution,
  unknown_example,
  invalid_parameters,
  size_mismatch,
  singular_evaluation,
  unsupported_conjugate,
  non_convergence,
  invalid_p,
  invalid_dual_field,
  flux_not_conservative,
  unsupported,
  config,
  missing_contact,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

// Config problems carry a 1-based line number when one is known (0 otherwise).
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, int line = 0)
      : Error(ErrorKind::config, what), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

}  // namespace crackdual
