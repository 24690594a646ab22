#include <string_view>

#include "doctest.h"
#include "support/oracles.hpp"
#include "svsp/crc32.hpp"
#include "svsp/rng.hpp"

using svsp::Bytes;
using svsp::SplitMix64;

namespace {

Bytes bytes_of(std::string_view s) {
  return Bytes(s.begin(), s.end());
}

}  // namespace

TEST_SUITE_BEGIN("crc32");

TEST_CASE("check value and small vectors") {
  CHECK(svsp::crc32(bytes_of("123456789")) == 0xCBF43926u);
  CHECK(svsp::crc32(bytes_of("")) == 0u);
  CHECK(svsp::crc32(bytes_of("abc")) == 0x352441C2u);
}

TEST_CASE("agrees with zlib on random buffers") {
  SplitMix64 rng(0xBEEF);
  for (int i = 0; i < 300; ++i) {
    Bytes buf(rng.below(4096));
    rng.fill(buf);
    CHECK(svsp::crc32(buf) == svsp::testing::zlib_crc32(buf));
  }
}

TEST_CASE("detects single bit flips") {
  SplitMix64 rng(0xF11);
  Bytes buf(256);
  rng.fill(buf);
  uint32_t base = svsp::crc32(buf);
  for (int i = 0; i < 64; ++i) {
    size_t bit = rng.below(buf.size() * 8);
    buf[bit / 8] ^= uint8_t(1u << (bit % 8));
    CHECK(svsp::crc32(buf) != base);
    buf[bit / 8] ^= uint8_t(1u << (bit % 8));
  }
  CHECK(svsp::crc32(buf) == base);
}

TEST_SUITE_END();
