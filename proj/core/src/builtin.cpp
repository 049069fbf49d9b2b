#include "cbsrv/builtin.hpp"

#include "cbsrv/model_io.hpp"
#include "cbsrv_embedded_models.hpp"

namespace cbsrv {

std::string_view builtin_task_text() { return embedded::kTaskModel; }
std::string_view builtin_task_monitor_text() { return embedded::kTaskMonitor; }
std::string_view builtin_readers_writers_text() { return embedded::kReadersWritersModel; }

CompositeSystem builtin_task() { return parse_model(builtin_task_text()); }
MonitorSpec builtin_task_monitor() { return parse_monitor(builtin_task_monitor_text()); }
CompositeSystem builtin_readers_writers() { return parse_model(builtin_readers_writers_text()); }

}  // namespace cbsrv
