#pragma once

namespace wate {

inline constexpr const char* version = "0.1.0";

}
