#ifndef VBMA_VERSION_HPP
#define VBMA_VERSION_HPP

namespace vbma {
inline constexpr const char* kVersion = "0.1.0";
}

#endif  // VBMA_VERSION_HPP
