#pragma once

#include <string_view>

#include "cbsrv/model.hpp"
#include "cbsrv/monitor.hpp"

namespace cbsrv {

/// Three workers and a task generator; every task is taken by two workers.
CompositeSystem builtin_task();
/// Homogeneity monitor for the Task system: pairwise task counts differ by less than 3.
MonitorSpec builtin_task_monitor();
/// Readers and a writer coordinated by a controller holding counters.
CompositeSystem builtin_readers_writers();

/// Raw bundled documents, as shipped in models/.
std::string_view builtin_task_text();
std::string_view builtin_task_monitor_text();
std::string_view builtin_readers_writers_text();

}  // namespace cbsrv
