#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace ifsc {

// Verbosity from the IFSC_LOG environment variable:
// "quiet" (errors only), "info" (default), "debug".
inline int log_level() {
  static const int level = [] {
    const char* v = std::getenv("IFSC_LOG");
    if (v == nullptr) return 1;
    if (std::strcmp(v, "quiet") == 0) return 0;
    if (std::strcmp(v, "debug") == 0) return 2;
    return 1;
  }();
  return level;
}

inline void log_info(const std::string& msg) {
  if (log_level() >= 1) std::fprintf(stderr, "[ifsc] %s\n", msg.c_str());
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::fprintf(stderr, "[ifsc:debug] %s\n", msg.c_str());
}

}  // namespace ifsc
