#include "svsp/metafile.hpp"

#include <stdexcept>

namespace svsp::wire {

uint32_t SessionMetafile::window_count() const {
  if (total_chunks == 0) return 0;
  return (total_chunks + window_size - 1) / window_size;
}

SessionMetafile build_metafile(BytesView content, uint16_t chunk_size,
                               uint16_t window_size,
                               const token::TokenNonce& nonce) {
  if (chunk_size < 1 || window_size < 1) {
    throw std::invalid_argument("metafile: chunk_size and window_size must "
                                "be >= 1");
  }
  uint64_t chunks =
      (content.size() + chunk_size - 1) / static_cast<uint64_t>(chunk_size);
  if (chunks > 0xFFFFFFFFull) {
    throw std::invalid_argument("metafile: chunk count exceeds 32 bits");
  }
  SessionMetafile meta;
  meta.content_length = content.size();
  meta.chunk_size = chunk_size;
  meta.total_chunks = static_cast<uint32_t>(chunks);
  meta.window_size = window_size;
  meta.token_nonce = nonce;
  meta.content_sha256 = Sha256::of(content);
  return meta;
}

Bytes encode_metafile(const SessionMetafile& meta) {
  Bytes out;
  out.reserve(kMetafileSize);
  put_u64(out, meta.content_length);
  put_u16(out, meta.chunk_size);
  put_u32(out, meta.total_chunks);
  put_u16(out, meta.window_size);
  out.insert(out.end(), meta.token_nonce.begin(), meta.token_nonce.end());
  out.insert(out.end(), meta.content_sha256.begin(),
             meta.content_sha256.end());
  return out;
}

std::optional<SessionMetafile> decode_metafile(BytesView data) {
  if (data.size() != kMetafileSize) return std::nullopt;
  SessionMetafile meta;
  size_t pos = 0;
  for (int i = 0; i < 8; ++i) meta.content_length = meta.content_length << 8 | data[pos++];
  meta.chunk_size = static_cast<uint16_t>(data[pos] << 8 | data[pos + 1]);
  pos += 2;
  for (int i = 0; i < 4; ++i) meta.total_chunks = meta.total_chunks << 8 | data[pos++];
  meta.window_size = static_cast<uint16_t>(data[pos] << 8 | data[pos + 1]);
  pos += 2;
  std::copy(data.begin() + pos, data.begin() + pos + 16,
            meta.token_nonce.begin());
  pos += 16;
  std::copy(data.begin() + pos, data.begin() + pos + 32,
            meta.content_sha256.begin());

  if (meta.chunk_size < 1 || meta.window_size < 1) return std::nullopt;
  uint64_t expect = (meta.content_length + meta.chunk_size - 1) /
                    meta.chunk_size;
  if (expect != meta.total_chunks) return std::nullopt;
  return meta;
}

}  // namespace svsp::wire
