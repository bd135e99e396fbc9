#pragma once

#include <string_view>

namespace entroflow {

enum class LogLevel { silent = 0, warning = 1, info = 2 };

void set_log_level(LogLevel level);
LogLevel log_level();
void log_warning(std::string_view message);
void log_info(std::string_view message);

}  // namespace entroflow
