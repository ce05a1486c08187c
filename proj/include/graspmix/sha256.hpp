#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <string>
#include <string_view>

#include "graspmix/error.hpp"

namespace graspmix {

/// Lowercase hex SHA-256 of `data`.
inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  require(EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) == 1, Errc::io,
          "SHA-256 computation failed");
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace graspmix
