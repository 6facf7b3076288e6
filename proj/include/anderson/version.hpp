#pragma once

namespace anderson {

inline constexpr const char* kToolVersion = "0.1.0";

/// Environment variable consulted for the default worker count.
inline constexpr const char* kWorkersEnvVar = "ANDERSONLAB_WORKERS";

} // namespace anderson
