#pragma once

#include <spdlog/spdlog.h>

namespace dlm {

/// Configures the shared logger from the DLM_LOG environment variable
/// (trace, debug, info, warn, error, off; default warn). Logs go to stderr.
void init_logging();

}  // namespace dlm
