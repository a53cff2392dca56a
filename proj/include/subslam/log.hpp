#pragma once

#include <cstdarg>

namespace subslam {

// Verbosity from the SLAM_LOG environment variable:
// error | warn | info | debug (default warn).
enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

LogLevel log_level();

void log_message(LogLevel level, const char* fmt, ...)
    __attribute__((format(printf, 2, 3)));

#define SUBSLAM_ERROR(...) ::subslam::log_message(::subslam::LogLevel::kError, __VA_ARGS__)
#define SUBSLAM_WARN(...) ::subslam::log_message(::subslam::LogLevel::kWarn, __VA_ARGS__)
#define SUBSLAM_INFO(...) ::subslam::log_message(::subslam::LogLevel::kInfo, __VA_ARGS__)
#define SUBSLAM_DEBUG(...) ::subslam::log_message(::subslam::LogLevel::kDebug, __VA_ARGS__)

}  // namespace subslam
