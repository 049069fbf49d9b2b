#include "cbsrv/error.hpp"

namespace cbsrv {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::unbound_variable: return "UnboundVariable";
    case Errc::type_mismatch: return "TypeMismatch";
    case Errc::overflow: return "Overflow";
    case Errc::syntax_error: return "SyntaxError";
    case Errc::validation_error: return "ValidationError";
    case Errc::not_enabled: return "NotEnabled";
    case Errc::malformed_stream: return "MalformedStream";
    case Errc::arity_mismatch: return "ArityMismatch";
    case Errc::replay_failed: return "ReplayFailed";
    case Errc::already_instrumented: return "AlreadyInstrumented";
    case Errc::guard_violated: return "GuardViolated";
    case Errc::not_busy: return "NotBusy";
    case Errc::nothing_to_deliver: return "NothingToDeliver";
    case Errc::unknown_monitored_variable: return "UnknownMonitoredVariable";
    case Errc::unknown_variable: return "UnknownVariable";
    case Errc::nondeterministic_transition: return "NondeterministicTransition";
    case Errc::partial_state_rejected: return "PartialStateRejected";
    case Errc::incompatible_support: return "IncompatibleSupport";
    case Errc::bound_exceeded: return "BoundExceeded";
    case Errc::worker_panicked: return "WorkerPanicked";
    case Errc::malformed_trace: return "MalformedTrace";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string_view diag_name(DiagCode code) noexcept {
  switch (code) {
    case DiagCode::unknown_location: return "UnknownLocation";
    case DiagCode::unknown_port: return "UnknownPort";
    case DiagCode::unknown_component: return "UnknownComponent";
    case DiagCode::unbound_variable: return "UnboundVariable";
    case DiagCode::type_mismatch: return "TypeMismatch";
    case DiagCode::duplicate_name: return "DuplicateName";
    case DiagCode::duplicate_component_in_interaction: return "DuplicateComponentInInteraction";
    case DiagCode::empty_interaction: return "EmptyInteraction";
    case DiagCode::bad_transfer_target: return "BadTransferTarget";
    case DiagCode::bad_rgt: return "BadRgt";
    case DiagCode::bad_monitor: return "BadMonitor";
  }
  return "Unknown";
}

SyntaxError::SyntaxError(const std::string& message, int line, int column)
    : Error(Errc::syntax_error,
            std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {
std::string join_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  std::string out = "validation failed";
  for (const auto& d : diagnostics) {
    out += "\n  ";
    out += diag_name(d.code);
    out += ": ";
    out += d.message;
  }
  return out;
}
}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : Error(Errc::validation_error, join_diagnostics(diagnostics)),
      diagnostics_(std::move(diagnostics)) {}

}  // namespace cbsrv
