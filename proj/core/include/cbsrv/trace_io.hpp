#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbsrv/engine.hpp"
#include "cbsrv/monitor.hpp"
#include "cbsrv/state.hpp"
#include "cbsrv/witness.hpp"

namespace cbsrv {

/// Line form:
///   STATE [{"loc":"free","vars":{"x":0}}, ...]
///   LABEL ex12
///   DELIVER ex12 [...]       (reconstructed state handed to the monitor)
///   VERDICT currently_true
/// STATE and LABEL lines alternate; DELIVER and VERDICT lines are annotations that
/// readers skip when rebuilding the trace.
std::string write_trace_lines(const Trace& t);
std::string write_run_lines(const RunResult& r);

/// Compact JSON form: [state, "label", state, ...].
std::string write_trace_json(const Trace& t);

/// Accepts either form. Errors: Error(malformed_trace).
Trace read_trace(std::string_view text);

/// Witness prefix in line form; the trailing label, if any, is the last LABEL line.
std::string write_witness_lines(const WitnessPrefix& w);
std::string write_witness_json(const WitnessPrefix& w);

std::string state_to_json(const SystemState& q);
SystemState state_from_json(std::string_view text);

}  // namespace cbsrv
