#pragma once

#include <cstdint>
#include <optional>

#include "svsp/bytes.hpp"
#include "svsp/sha256.hpp"
#include "svsp/token.hpp"

namespace svsp::wire {

// Plaintext session descriptor, RSA-encrypted before it travels.  Fixed
// 64-byte layout: content_length u64, chunk_size u16, total_chunks u32,
// window_size u16, token_nonce 16 bytes, content_sha256 32 bytes, all
// integers big-endian.
struct SessionMetafile {
  uint64_t content_length = 0;
  uint16_t chunk_size = 0;
  uint32_t total_chunks = 0;
  uint16_t window_size = 0;
  token::TokenNonce token_nonce{};
  Sha256Digest content_sha256{};

  bool operator==(const SessionMetafile&) const = default;

  // ceil(total_chunks / window_size); 0 for empty content.
  uint32_t window_count() const;
};

inline constexpr size_t kMetafileSize = 64;

// Throws std::invalid_argument unless chunk_size and window_size are >= 1
// and the chunk count fits 32 bits.
SessionMetafile build_metafile(BytesView content, uint16_t chunk_size,
                               uint16_t window_size,
                               const token::TokenNonce& nonce);

Bytes encode_metafile(const SessionMetafile& meta);

// nullopt when the input is not exactly 64 bytes or the fields are
// inconsistent (zero sizes with nonzero length, wrong chunk count).
std::optional<SessionMetafile> decode_metafile(BytesView data);

}  // namespace svsp::wire
