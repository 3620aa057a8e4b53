#ifndef MODELCMP_SHA256_HPP
#define MODELCMP_SHA256_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace modelcmp {

/// SHA-256 digest of a byte string, lowercase hex.
std::string sha256_hex(std::string_view data);

}  // namespace modelcmp

#endif
