#include "cascade/hash.hpp"

#include <array>
#include <cstdio>

#include <openssl/evp.h>

#include "cascade/lattice.hpp"

namespace cascade {

namespace {

std::array<unsigned char, 32> digest(std::string_view bytes) {
  std::array<unsigned char, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size())
    throw Error("sha256 failed");
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  const auto d = digest(bytes);
  std::string hex(64, '0');
  for (std::size_t i = 0; i < d.size(); ++i) std::snprintf(&hex[2 * i], 3, "%02x", d[i]);
  return hex;
}

std::uint64_t hash64(std::string_view bytes) {
  const auto d = digest(bytes);
  std::uint64_t h = 0;
  for (int i = 0; i < 8; ++i) h = (h << 8) | d[std::size_t(i)];
  return h;
}

}  // namespace cascade
