#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cascade {

std::string sha256_hex(std::string_view bytes);

/// Leading 64 bits of the SHA-256 digest.
std::uint64_t hash64(std::string_view bytes);

}  // namespace cascade
