#include "dlm/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

#include <cstdlib>
#include <mutex>

namespace dlm {

void init_logging() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("dlm");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
  });
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("DLM_LOG"); env && *env) {
    level = spdlog::level::from_str(env);
  }
  spdlog::set_level(level);
}

}  // namespace dlm
