#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace svsp {

using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

std::string to_hex(BytesView data);
Bytes from_hex(std::string_view hex);  // throws std::invalid_argument

// Big-endian scalar writers shared by the codec and the metafile layout.
void put_u8(Bytes& out, uint8_t v);
void put_u16(Bytes& out, uint16_t v);
void put_u32(Bytes& out, uint32_t v);
void put_u64(Bytes& out, uint64_t v);

inline BytesView as_view(const Bytes& b) { return BytesView(b.data(), b.size()); }

inline BytesView as_view(std::string_view s) {
  return BytesView(reinterpret_cast<const uint8_t*>(s.data()), s.size());
}

}  // namespace svsp
