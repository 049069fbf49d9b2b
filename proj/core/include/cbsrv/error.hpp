#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cbsrv {

enum class Errc {
  unbound_variable,
  type_mismatch,
  overflow,
  syntax_error,
  validation_error,
  not_enabled,
  malformed_stream,
  arity_mismatch,
  replay_failed,
  already_instrumented,
  guard_violated,
  not_busy,
  nothing_to_deliver,
  unknown_monitored_variable,
  unknown_variable,
  nondeterministic_transition,
  partial_state_rejected,
  incompatible_support,
  bound_exceeded,
  worker_panicked,
  malformed_trace,
  invalid_argument,
};

std::string_view errc_name(Errc code) noexcept;

/// Base exception for every failure the library reports.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Parse failure with a 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, int line, int column);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

enum class DiagCode {
  unknown_location,
  unknown_port,
  unknown_component,
  unbound_variable,
  type_mismatch,
  duplicate_name,
  duplicate_component_in_interaction,
  empty_interaction,
  bad_transfer_target,
  bad_rgt,
  bad_monitor,
};

std::string_view diag_name(DiagCode code) noexcept;

struct Diagnostic {
  DiagCode code;
  std::string message;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace cbsrv
