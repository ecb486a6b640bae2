#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cqnls {

enum class ErrorCode {
  invalid_configuration,
  invalid_frequency,
  out_of_range,
  domain_too_small,
  domain_mismatch,
  no_convergence,
  fit_impossible,
  diverged,
  parse_error,
  io_error,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_configuration: return "invalid-configuration";
    case ErrorCode::invalid_frequency: return "invalid-frequency";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::domain_too_small: return "domain-too-small";
    case ErrorCode::domain_mismatch: return "domain-mismatch";
    case ErrorCode::no_convergence: return "no-convergence";
    case ErrorCode::fit_impossible: return "fit-impossible";
    case ErrorCode::diverged: return "diverged";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

/// Library exception. Every failure mode carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Newton stagnation; keeps the last residual so callers can report it.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double last_residual)
      : Error(ErrorCode::no_convergence, what), last_residual_(last_residual) {}

  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Non-finite values or overflow during time stepping.
class Diverged : public Error {
 public:
  Diverged(const std::string& what, std::size_t step)
      : Error(ErrorCode::diverged, what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace cqnls
