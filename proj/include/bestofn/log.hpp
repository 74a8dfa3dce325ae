#pragma once

#include <sstream>
#include <string>

namespace bestofn {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

// Threshold comes from the BESTOFN_LOG env var (debug|info|warn|error|off),
// default warn. Output goes to stderr; stdout is reserved for the CLI's
// machine-readable summary lines.
LogLevel log_threshold();
void set_log_threshold(LogLevel level);
bool log_enabled(LogLevel level);
void log_line(LogLevel level, const std::string& message);

} // namespace bestofn

#define BESTOFN_LOG_AT(level, expr)                                  \
    do {                                                             \
        if (::bestofn::log_enabled(level)) {                         \
            std::ostringstream oss__;                                \
            oss__ << expr;                                           \
            ::bestofn::log_line(level, oss__.str());                 \
        }                                                            \
    } while (0)

#define LOG_DEBUG(expr) BESTOFN_LOG_AT(::bestofn::LogLevel::debug, expr)
#define LOG_INFO(expr) BESTOFN_LOG_AT(::bestofn::LogLevel::info, expr)
#define LOG_WARN(expr) BESTOFN_LOG_AT(::bestofn::LogLevel::warn, expr)
#define LOG_ERROR(expr) BESTOFN_LOG_AT(::bestofn::LogLevel::error, expr)
