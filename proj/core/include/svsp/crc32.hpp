#pragma once

#include <cstdint>

#include "svsp/bytes.hpp"

namespace svsp {

// CRC-32 (IEEE 802.3, reflected, polynomial 0xEDB88320), the variant used by
// zlib. Chunk payload integrity on the wire is checked with this.
uint32_t crc32(BytesView data);
uint32_t crc32_update(uint32_t crc, BytesView data);

}  // namespace svsp
