#pragma once

namespace siftlab {

inline constexpr const char* kVersion = "siftlab 0.1.0";

} // namespace siftlab
