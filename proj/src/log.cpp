#include "procache/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace procache {

LogLevel log_threshold() {
    static LogLevel cached = [] {
        const char* env = std::getenv("PROCACHE_LOG");
        if (env == nullptr) return LogLevel::warn;
        if (std::strcmp(env, "error") == 0) return LogLevel::error;
        if (std::strcmp(env, "info") == 0) return LogLevel::info;
        if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
        return LogLevel::warn;
    }();
    return cached;
}

void log_message(LogLevel level, const std::string& msg) {
    if (static_cast<int>(level) > static_cast<int>(log_threshold())) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::fprintf(stderr, "[procache %s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

}  // namespace procache
