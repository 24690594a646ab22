#pragma once

#include <array>
#include <cstdint>

#include "svsp/bytes.hpp"

namespace svsp {

using Sha256Digest = std::array<uint8_t, 32>;

// Streaming SHA-256 (FIPS 180-4).
class Sha256 {
 public:
  Sha256();
  void update(BytesView data);
  Sha256Digest finish();

  static Sha256Digest of(BytesView data) {
    Sha256 h;
    h.update(data);
    return h.finish();
  }

 private:
  void compress(const uint8_t block[64]);

  std::array<uint32_t, 8> state_;
  uint8_t buf_[64];
  size_t buf_len_ = 0;
  uint64_t total_bytes_ = 0;
};

}  // namespace svsp
