#ifndef MODELCMP_VERSION_HPP
#define MODELCMP_VERSION_HPP

namespace modelcmp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace modelcmp

#endif
