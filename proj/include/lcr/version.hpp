#pragma once

#ifndef LCR_VERSION
#define LCR_VERSION "0.1.0"
#endif

namespace lcr {
inline constexpr const char* library_version() noexcept { return LCR_VERSION; }
}  // namespace lcr
