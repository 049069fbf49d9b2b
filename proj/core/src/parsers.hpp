#pragma once

// Block parsers shared by the model and monitor readers.

#include "cbsrv/monitor.hpp"
#include "lexer.hpp"

namespace cbsrv::detail {

/// Parses "monitor <name> { ... }" starting at the keyword.
MonitorSpec parse_monitor_block(TokenStream& ts);

}  // namespace cbsrv::detail
