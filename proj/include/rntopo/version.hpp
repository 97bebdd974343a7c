#pragma once

namespace rntopo {

inline constexpr const char* version = "0.1.0";

}  // namespace rntopo
