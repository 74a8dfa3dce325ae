#include "bestofn/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <string>

namespace bestofn {

namespace {

LogLevel parse_level(const char* value) {
    std::string v = value ? value : "";
    if (v == "debug") return LogLevel::debug;
    if (v == "info") return LogLevel::info;
    if (v == "warn" || v.empty()) return LogLevel::warn;
    if (v == "error") return LogLevel::error;
    if (v == "off" || v == "none") return LogLevel::off;
    return LogLevel::warn;
}

std::atomic<int>& threshold_slot() {
    static std::atomic<int> level{static_cast<int>(parse_level(std::getenv("BESTOFN_LOG")))};
    return level;
}

const char* level_tag(LogLevel level) {
    switch (level) {
        case LogLevel::debug: return "debug";
        case LogLevel::info: return "info";
        case LogLevel::warn: return "warn";
        case LogLevel::error: return "error";
        default: return "?";
    }
}

} // namespace

LogLevel log_threshold() { return static_cast<LogLevel>(threshold_slot().load(std::memory_order_relaxed)); }

void set_log_threshold(LogLevel level) { threshold_slot().store(static_cast<int>(level), std::memory_order_relaxed); }

bool log_enabled(LogLevel level) { return static_cast<int>(level) >= static_cast<int>(log_threshold()); }

void log_line(LogLevel level, const std::string& message) {
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    std::fprintf(stderr, "[bestofn %s] %s\n", level_tag(level), message.c_str());
    std::fflush(stderr);
}

} // namespace bestofn
