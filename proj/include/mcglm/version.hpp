#pragma once

namespace mcglm {
inline constexpr const char* kVersion = "0.1.0";
}
