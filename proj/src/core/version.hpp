#pragma once

namespace scp {

inline constexpr const char* kSoftwareVersion = "1.0.0";

}  // namespace scp
