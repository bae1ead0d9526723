#pragma once

namespace rsm {
inline constexpr const char* VERSION = "0.1.0";
}
